//! Reduced geodesic equations integrated numerically, with the drift of
//! the four first integrals and the radial turning points.

use h5geo::dynamics::{drift_report, integrate_reduced, turning_points, IntegratorConfig};
use h5geo::reduction::{state_from_charges, ConservedCharges};

fn main() -> h5geo::Result<()> {
    let c = ConservedCharges::new(3.0, 0.2, 0.3, 0.2, 0.5);
    let s0 = state_from_charges(&c, 0.8, 1.0, 1.0)?;
    let tr = integrate_reduced(&s0, (0.0, 20.0), &IntegratorConfig::default())?;
    println!("{} accepted steps on [0, 20]", tr.len());
    for t in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let s = tr.sample(t).unwrap();
        println!("t = {t:5.1}  r = {:.10}  theta1 = {:.10}  theta2 = {:+.10}", s.r, s.th1, s.th2);
    }
    println!("max drift of I1..I4: {:?}", drift_report(&tr, c.c0).max_drift);
    let tp = turning_points(&tr)?;
    println!("turning points: {:?}", tp.iter().map(|t| format!("{t:.8}")).collect::<Vec<_>>());
    Ok(())
}
