//! Numerical integration of the full and reduced geodesic equations. This is
//! the reference every closed-form result is checked against, so it shares
//! nothing with `quadrature` beyond the state types.

pub mod dopri;

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classify::QuarticProfile;
use crate::error::{Error, Result};
use crate::heisenberg::{full_rhs, CotangentState};
use crate::reduction::{integrals, rhs_hyper_unchecked, HypersphericalState};
use crate::trace::{AmbientTrace, ChartExit, GeodesicTrace};

use dopri::Solution;

/// Integration stops when `r`, `θ1` or `π/2 − θ1` drops below this.
pub const CHART_EXIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub dense_output: bool,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            dense_output: true,
            initial_step: None,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0) {
            return Err(Error::Config(format!(
                "tolerances and max_step must be positive: {self:?}"
            )));
        }
        if let Some(h) = self.initial_step {
            if !(h > 0.0) {
                return Err(Error::Config(format!("initial step {h} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftReport {
    /// `max_t |I_k(t) − I_k(t0)|` for `k = 1..4`.
    pub max_drift: [f64; 4],
    /// `H̃(t) − H̃(t0)` per sample.
    pub hamiltonian_residual: Vec<f64>,
}

impl DriftReport {
    pub fn worst(&self) -> f64 {
        self.max_drift.iter().copied().fold(0.0, f64::max)
    }
}

fn chart_stop(y: &[f64; 8]) -> Option<String> {
    if y.iter().any(|v| !v.is_finite()) {
        return Some("state became non-finite".into());
    }
    if y[0] < CHART_EXIT {
        return Some(format!("r = {:e} reached the chart origin", y[0]));
    }
    if y[1] < CHART_EXIT || y[1] > FRAC_PI_2 - CHART_EXIT {
        return Some(format!("theta1 = {} reached the chart boundary", y[1]));
    }
    None
}

/// Distance to the chart boundary beyond the exit threshold.
fn chart_margin(y: &[f64; 8]) -> f64 {
    y[0].min(y[1]).min(FRAC_PI_2 - y[1]) - CHART_EXIT
}

/// Moves a chart exit from the end of the overshooting step back to the
/// crossing of the exit threshold, so every sample lies in the chart.
fn polish_exit(sol: &mut Solution<8>) {
    if sol.stopped.is_none() {
        return;
    }
    let Some(st) = sol.steps.last() else { return };
    let (a, b) = (st.t0, st.t1());
    let end = st.eval(b);
    if !end.iter().all(|v| v.is_finite()) || chart_margin(&st.eval(a)) <= 0.0 {
        return;
    }
    let t = dopri::find_root(|t| chart_margin(&st.eval(t)), a, b, 1e-14 * b.abs().max(1.0));
    sol.truncate_last(t);
}

fn build_trace(sol: Solution<8>, c0: f64, cfg: &IntegratorConfig) -> Result<GeodesicTrace> {
    let backward = sol.t_last() < sol.t_first();
    let mut times = sol.t.clone();
    let mut states: Vec<_> = sol
        .y
        .iter()
        .map(|y| HypersphericalState::from_array(y, c0))
        .collect();
    if backward {
        times.reverse();
        states.reverse();
    }
    let mut tr = GeodesicTrace::new(times, states, cfg.rel_tol.max(cfg.abs_tol))?;
    tr.exit = sol.stopped.clone().map(|reason| ChartExit {
        t: sol.t_last(),
        reason,
    });
    if cfg.dense_output {
        tr.dense = Some(Arc::new(sol));
    }
    Ok(tr)
}

/// Integrates the reduced equations from `s0` at `t_span.0` to `t_span.1`
/// (either direction). Samples are the accepted steps, sorted by time.
/// Reaching the chart boundary ends the run early with `exit` set.
pub fn integrate_reduced(
    s0: &HypersphericalState,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<GeodesicTrace> {
    s0.check_chart()?;
    let c0 = s0.c0;
    let f = |y: &[f64; 8]| rhs_hyper_unchecked(&HypersphericalState::from_array(y, c0));
    let mut sol = dopri::integrate(f, t_span.0, s0.to_array(), t_span.1, cfg, chart_stop)?;
    polish_exit(&mut sol);
    build_trace(sol, c0, cfg)
}

/// [`integrate_reduced`] sampled on a caller-supplied increasing grid whose
/// first point is the time of `s0`. A chart exit truncates the grid.
pub fn integrate_reduced_on_grid(
    s0: &HypersphericalState,
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<GeodesicTrace> {
    if grid.is_empty() {
        return Err(Error::Config("empty time grid".into()));
    }
    let cfg = IntegratorConfig {
        dense_output: true,
        ..*cfg
    };
    let full = integrate_reduced(s0, (grid[0], *grid.last().unwrap()), &cfg)?;
    let end = full.times.last().copied().unwrap();
    let keep: Vec<f64> = grid.iter().copied().filter(|&t| t <= end).collect();
    let mut out = full.resample(&keep)?;
    out.exit = full.exit.clone();
    Ok(out)
}

/// Integrates the canonical 10-dimensional system on `T*H5`.
pub fn integrate_full(
    s0: &CotangentState,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<AmbientTrace> {
    let f = |y: &[f64; 10]| full_rhs(&CotangentState::from_array(y));
    let stop = |y: &[f64; 10]| {
        y.iter()
            .any(|v| !v.is_finite())
            .then(|| "state became non-finite".to_string())
    };
    let sol = dopri::integrate(f, t_span.0, s0.to_array(), t_span.1, cfg, stop)?;
    let mut times = sol.t.clone();
    let mut states: Vec<_> = sol.y.iter().map(CotangentState::from_array).collect();
    if sol.t_last() < sol.t_first() {
        times.reverse();
        states.reverse();
    }
    Ok(AmbientTrace {
        times,
        states,
        exit: sol.stopped.clone().map(|reason| ChartExit {
            t: sol.t_last(),
            reason,
        }),
        dense: cfg.dense_output.then(|| Arc::new(sol)),
    })
}

/// Drift of the four integrals relative to the first sample, with the
/// integrals re-evaluated at level `c0`.
pub fn drift_report(trace: &GeodesicTrace, c0: f64) -> DriftReport {
    let ints: Vec<[f64; 4]> = trace
        .states
        .iter()
        .map(|s| integrals(&HypersphericalState { c0, ..*s }))
        .collect();
    let mut max_drift = [0.0; 4];
    for v in &ints {
        for k in 0..4 {
            max_drift[k] = f64::max(max_drift[k], (v[k] - ints[0][k]).abs());
        }
    }
    DriftReport {
        max_drift,
        hamiltonian_residual: ints.iter().map(|v| v[3] - ints[0][3]).collect(),
    }
}

/// Times at which `p_r` changes sign, polished on the dense output.
pub fn turning_points(trace: &GeodesicTrace) -> Result<Vec<f64>> {
    let sol = trace
        .dense()
        .ok_or_else(|| Error::Config("turning points need dense output".into()))?;
    let mut out = Vec::new();
    for (i, st) in sol.steps.iter().enumerate() {
        let (a, b) = (sol.y[i][4], sol.y[i + 1][4]);
        // A zero exactly at a step end is reported once, by the step it ends.
        if a == 0.0 && i > 0 {
            continue;
        }
        if a == 0.0 && i == 0 {
            continue;
        }
        if b == 0.0 || a.signum() != b.signum() {
            let t = dopri::find_root(|t| st.eval_component(t, 4), st.t0, st.t1(), 1e-13);
            out.push(t);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// `g(r) = f(r) / (r²(1+r²))` and `g'(r)`.
fn radial_potential(p: &QuarticProfile, r: f64) -> (f64, f64) {
    let r2 = r * r;
    let f = p.eval(r);
    let df = (4.0 * p.a * r2 + 2.0 * p.b) * r;
    let h = r2 * (1.0 + r2);
    let dh = 2.0 * r + 4.0 * r2 * r;
    (f / h, (df * h - f * dh) / (h * h))
}

/// One-degree-of-freedom oracle for the radial equation in the scaled time
/// `τ`: `r'' = g'(r)/2`, `r'(0) = sign·sqrt(g(r0))`. Works for any profile,
/// including the ones no geodesic realises. Components are `(r, dr/dτ)`.
pub fn integrate_radial(
    p: &QuarticProfile,
    r0: f64,
    sign: f64,
    tau_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Solution<2>> {
    let (g0, _) = radial_potential(p, r0);
    if g0 < -1e-12 {
        return Err(Error::Domain(format!("f({r0}) < 0: radius not admissible")));
    }
    let y0 = [r0, sign.signum() * g0.max(0.0).sqrt()];
    let f = |y: &[f64; 2]| [y[1], 0.5 * radial_potential(p, y[0]).1];
    let stop = |y: &[f64; 2]| (y[0] < CHART_EXIT || !y[0].is_finite()).then(|| "r reached 0".to_string());
    dopri::integrate(f, tau_span.0, y0, tau_span.1, cfg, stop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::state_from_charges;
    use crate::reduction::ConservedCharges;

    fn case_g_state() -> HypersphericalState {
        let c = ConservedCharges::new(3.0, 0.2, 0.3, 0.2, 0.5);
        state_from_charges(&c, 0.8, 1.0, 1.0).unwrap()
    }

    #[test]
    fn conserves_the_integrals() {
        let tr = integrate_reduced(&case_g_state(), (0.0, 10.0), &IntegratorConfig::default()).unwrap();
        assert!(tr.exit.is_none());
        let d = drift_report(&tr, tr.first().c0);
        assert!(d.worst() < 1e-8, "{d:?}");
    }

    #[test]
    fn constant_trace_has_no_drift() {
        let s = case_g_state();
        let tr = GeodesicTrace::new(vec![0.0, 1.0], vec![s, s], 0.0).unwrap();
        assert_eq!(drift_report(&tr, s.c0).worst(), 0.0);
    }

    #[test]
    fn zero_span_returns_the_initial_state() {
        let s = case_g_state();
        let tr = integrate_reduced(&s, (0.0, 0.0), &IntegratorConfig::default()).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.states[0], s);
    }

    #[test]
    fn bad_config_is_rejected() {
        let cfg = IntegratorConfig {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(integrate_reduced(&case_g_state(), (0.0, 1.0), &cfg).is_err());
    }
}
