//! Which `θ̇2`/`θ̇3` rate law reproduces the reduced equations: each variant
//! is quadratured on the analytic `r`, `θ1` and compared to the integrator.

use serde::Serialize;

use crate::dynamics::{integrate_reduced_on_grid, IntegratorConfig};
use crate::error::{Error, Result};
use crate::reduction::{ConservedCharges, HypersphericalState};

use super::angles::{theta1_along, theta23_variant, Theta23Variant};
use super::RadialSolution;

#[derive(Debug, Clone, Serialize)]
pub struct VariantError {
    pub variant: Theta23Variant,
    pub formula: &'static str,
    pub max_theta2_error: f64,
    pub max_theta3_error: f64,
}

impl VariantError {
    pub fn worst(&self) -> f64 {
        self.max_theta2_error.max(self.max_theta3_error)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Theta23Audit {
    pub charges: ConservedCharges,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub variants: Vec<VariantError>,
    /// The variant with the smallest error.
    pub best: Theta23Variant,
}

pub fn audit_theta23(
    c: &ConservedCharges,
    init: &HypersphericalState,
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Theta23Audit> {
    let ode = integrate_reduced_on_grid(init, grid, cfg)?;
    if ode.len() != grid.len() {
        return Err(Error::Domain("the reference integration left the chart".into()));
    }
    let sol = RadialSolution::from_charges(c, init.r, init.pr, grid[0])?;
    let path = sol.path(grid)?;
    let th1 = theta1_along(c, &path, init.th1, init.pth1)?;
    let mut variants = Vec::new();
    for v in Theta23Variant::ALL {
        let (t2, t3) = theta23_variant(c, &path, &th1, init.th2, init.th3, v)?;
        let err = |xs: &[f64], col: usize| {
            xs.iter()
                .zip(&ode.states)
                .map(|(x, s)| (x - s.to_array()[col]).abs())
                .fold(0.0, f64::max)
        };
        variants.push(VariantError {
            variant: v,
            formula: v.formula(),
            max_theta2_error: err(&t2, 2),
            max_theta3_error: err(&t3, 3),
        });
    }
    let best = variants
        .iter()
        .min_by(|a, b| a.worst().total_cmp(&b.worst()))
        .unwrap()
        .variant;
    Ok(Theta23Audit {
        charges: *c,
        t_start: grid[0],
        t_end: *grid.last().unwrap(),
        samples: grid.len(),
        variants,
        best,
    })
}
