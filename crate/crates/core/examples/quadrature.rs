//! The closed-form solution: r(t) from the elliptic quadratures, the angles
//! from the first integrals, compared against the integrator.

use h5geo::dynamics::{integrate_reduced_on_grid, IntegratorConfig};
use h5geo::quadrature::{geodesic_quadrature, time_of_radius, RadialSolution};
use h5geo::reduction::{state_from_charges, ConservedCharges};

fn main() -> h5geo::Result<()> {
    let c = ConservedCharges::new(3.0, 0.2, 0.3, 0.2, 0.5);
    let sol = RadialSolution::from_charges(&c, 0.8, 1.0, 0.0)?;
    let period = sol.period().unwrap();
    println!("radial period {period:.12}");
    println!("turning times in [0, 2T]: {:?}", sol.turning_times(0.0, 2.0 * period));
    for r in [0.5, 0.8, 1.1] {
        println!("t(r = {r}) = {:.12} from the inner turning point", time_of_radius(&sol.profile, r, 1.0, 0.0)?);
    }

    let s0 = state_from_charges(&c, 0.8, 1.0, 1.0)?;
    let grid: Vec<f64> = (0..=10).map(|i| i as f64).collect();
    let ana = geodesic_quadrature(&c, &s0, &grid)?;
    let ode = integrate_reduced_on_grid(&s0, &grid, &IntegratorConfig::default())?;
    println!("     t        r             theta1        theta2         |diff|");
    for ((t, a), o) in grid.iter().zip(&ana.states).zip(&ode.states) {
        let d = a.to_array().iter().zip(o.to_array()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        println!("{t:6.1} {:13.10} {:13.10} {:+14.10} {d:9.1e}", a.r, a.th1, a.th2);
    }
    Ok(())
}
