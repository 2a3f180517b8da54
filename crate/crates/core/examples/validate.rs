//! Cross-validation report for the default bounded level set, plus the
//! audit of the three candidate theta2/theta3 rate laws.

use h5geo::cli::validate::{cross_validate, default_configuration};
use h5geo::dynamics::IntegratorConfig;
use h5geo::quadrature::audit_theta23;
use h5geo::reduction::state_from_charges;

fn main() -> h5geo::Result<()> {
    let (c, r0) = default_configuration();
    let s0 = state_from_charges(&c, r0, 1.0, 1.0)?;
    let grid: Vec<f64> = (0..=200).map(|i| 0.05 * i as f64).collect();
    let cfg = IntegratorConfig::default();
    let rep = cross_validate(&c, &s0, &grid, &cfg, 1e-6)?;
    for ch in &rep.checks {
        println!("{:<40} {:10.2e} {}", ch.name, ch.value, if ch.pass { "ok" } else { "FAIL" });
    }

    let audit = audit_theta23(&c, &s0, &grid, &cfg)?;
    println!();
    for v in &audit.variants {
        println!("{:<60} theta2 {:9.2e}  theta3 {:9.2e}", v.formula, v.max_theta2_error, v.max_theta3_error);
    }
    println!("best: {:?}", audit.best);
    Ok(())
}
