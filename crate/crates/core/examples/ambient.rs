//! Lift of the analytic solution to a curve in H5: z from the horizontality
//! condition, checked against the full ten-dimensional flow.

use h5geo::dynamics::{integrate_full, IntegratorConfig};
use h5geo::heisenberg::{horizontality_defect, sr_speed, velocity};
use h5geo::quadrature::{geodesic_quadrature, reconstruct_ambient};
use h5geo::reduction::{state_from_charges, ConservedCharges};

fn main() -> h5geo::Result<()> {
    let c = ConservedCharges::new(1.0, 0.52, 0.35, 0.52, 0.5);
    let s0 = state_from_charges(&c, 1.5, -1.0, 1.0)?;
    let grid: Vec<f64> = (0..=8).map(|i| 1.25 * i as f64).collect();
    let tr = geodesic_quadrature(&c, &s0, &grid)?;
    let amb = reconstruct_ambient(&tr, 0.0)?;
    let full = integrate_full(&amb.states[0], (0.0, 10.0), &IntegratorConfig::default())?;
    println!("    t      x1        x2        y1        y2        z          |z - z_full|  speed");
    for (t, s) in grid.iter().zip(&amb.states) {
        let v = velocity(s);
        assert!(horizontality_defect(&s.q, &v).abs() < 1e-12);
        let q = s.q;
        let dz = (full.sample(*t).unwrap().q.z - q.z).abs();
        println!(
            "{t:6.2} {:+9.5} {:+9.5} {:+9.5} {:+9.5} {:+10.6} {dz:12.1e} {:.12}",
            q.x1, q.x2, q.y1, q.y2, q.z, sr_speed(&q, &v)?
        );
    }
    Ok(())
}
