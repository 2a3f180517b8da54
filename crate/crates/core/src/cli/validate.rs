//! Cross-validation of the analytic pipeline against the integrators.

use std::io::Write;

use serde::Serialize;

use crate::dynamics::{drift_report, integrate_full, integrate_reduced_on_grid, IntegratorConfig};
use crate::error::{Error, Result};
use crate::heisenberg::{horizontality_defect, inner, velocity};
use crate::quadrature::{geodesic_quadrature, reconstruct_ambient};
use crate::reduction::{charges_from_state, state_from_charges, ConservedCharges, HypersphericalState};

use super::{resolve_initial, Failure, Format, ValidateArgs};

const COORDS: [&str; 8] = ["r", "theta1", "theta2", "theta3", "p_r", "p_theta1", "p_theta2", "p_theta3"];

/// The level set checked when `validate` is run without arguments.
pub fn default_configuration() -> (ConservedCharges, f64) {
    (ConservedCharges::new(3.0, 0.2, 0.3, 0.2, 0.5), 0.8)
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub charges: ConservedCharges,
    pub case: String,
    pub t_end: f64,
    pub samples: usize,
    pub tol: f64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.value)
    }
}

/// Runs both pipelines on `grid` and collects the discrepancies.
pub fn cross_validate(
    c: &ConservedCharges,
    s0: &HypersphericalState,
    grid: &[f64],
    cfg: &IntegratorConfig,
    tol: f64,
) -> Result<ValidationReport> {
    let ana = geodesic_quadrature(c, s0, grid)?;
    let ode = integrate_reduced_on_grid(s0, grid, cfg)?;
    if let Some(x) = &ode.exit {
        return Err(Error::CoordinateSingularity(format!(
            "reference integration left the chart at t = {}: {}",
            x.t, x.reason
        )));
    }
    let mut vals: Vec<(String, f64)> = Vec::new();
    for (i, name) in COORDS.iter().enumerate() {
        let d = ana
            .states
            .iter()
            .zip(&ode.states)
            .map(|(a, b)| (a.to_array()[i] - b.to_array()[i]).abs())
            .fold(0.0, f64::max);
        vals.push((format!("max |{name}_quadrature - {name}_ode|"), d));
    }
    vals.push(("integral drift (ode)".into(), drift_report(&ode, s0.c0).worst()));
    vals.push(("integral drift (quadrature)".into(), ana.max_residual()));

    let amb = reconstruct_ambient(&ana, 0.0)?;
    let speed = (2.0 * c.c4).sqrt();
    let (mut defect, mut dev): (f64, f64) = (0.0, 0.0);
    for st in &amb.states {
        let v = velocity(st);
        defect = defect.max(horizontality_defect(&st.q, &v).abs());
        dev = dev.max((inner(&st.q, &v, &v).max(0.0).sqrt() - speed).abs());
    }
    vals.push(("horizontality defect".into(), defect));
    vals.push(("speed deviation".into(), dev));
    let full = integrate_full(&amb.states[0], (grid[0], *grid.last().unwrap()), cfg)?;
    let dz = grid
        .iter()
        .zip(&amb.states)
        .map(|(&t, a)| full.sample(t).map_or(f64::INFINITY, |f| (f.q.z - a.q.z).abs()))
        .fold(0.0, f64::max);
    vals.push(("max |z_quadrature - z_full|".into(), dz));

    Ok(ValidationReport {
        charges: *c,
        case: crate::classify::profile_from_charges(c)
            .map(|p| p.case_tag.to_string())
            .unwrap_or_default(),
        t_end: *grid.last().unwrap(),
        samples: grid.len(),
        tol,
        checks: vals
            .into_iter()
            .map(|(name, value)| Check {
                name,
                pass: value < tol,
                value,
            })
            .collect(),
    })
}

pub fn cmd_validate(a: &ValidateArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let nothing = a.state.state.is_none() && !a.charges.any_given() && a.state.r0.is_none();
    let (s0, c) = if nothing {
        let (c, r0) = default_configuration();
        let c = ConservedCharges {
            c0: a.charges.c0.unwrap_or(c.c0),
            ..c
        };
        (state_from_charges(&c, r0, a.state.sign_pr, a.state.sign_pth1)?, c)
    } else {
        let (s0, c) = resolve_initial(&a.charges, &a.state, true)?;
        let c = match c {
            Some(c) => c,
            None => charges_from_state(&s0)?,
        };
        (s0, c)
    };
    let grid = a.grid.grid()?;
    let rep = cross_validate(&c, &s0, &grid, &a.grid.integrator()?, a.tol)?;
    if a.format == Format::Json {
        serde_json::to_writer_pretty(&mut *out, &rep).map_err(|e| Failure::runtime(e.to_string()))?;
        writeln!(out)?;
    } else {
        writeln!(
            out,
            "# validate case {} on t in [0, {}] ({} samples), tol {:e}",
            rep.case, rep.t_end, rep.samples, rep.tol
        )?;
        for ch in &rep.checks {
            writeln!(
                out,
                "{:<40} {:>10.3e}  {}",
                ch.name,
                ch.value,
                if ch.pass { "ok" } else { "FAIL" }
            )?;
        }
    }
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::runtime("tolerance exceeded"))
    }
}
