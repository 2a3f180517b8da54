//! Time-indexed samples of a reduced or ambient geodesic, with the
//! conserved-quantity diagnostics attached to every sample.

use std::sync::Arc;

use crate::dynamics::dopri::Solution;
use crate::error::{Error, Result};
use crate::heisenberg::CotangentState;
use crate::reduction::{integrals, HypersphericalState};

/// Where and why an integration stopped before its requested end.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartExit {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct GeodesicTrace {
    /// Strictly increasing.
    pub times: Vec<f64>,
    pub states: Vec<HypersphericalState>,
    /// `(I1, I2, I3, I4)` at each sample.
    pub integrals: Vec<[f64; 4]>,
    /// `max_k |I_k(t) − I_k(t0)|` at each sample.
    pub residuals: Vec<f64>,
    /// Accuracy the producer aimed for; drift above it is suspicious.
    pub tolerance: f64,
    /// Radial branch index per sample (analytic traces only).
    pub branch: Option<Vec<i64>>,
    /// `∫_{t0}^t dt/(1+r²)` per sample, when the producer knows it exactly.
    pub clock_j: Option<Vec<f64>>,
    pub exit: Option<ChartExit>,
    pub(crate) dense: Option<Arc<Solution<8>>>,
}

impl GeodesicTrace {
    pub fn new(times: Vec<f64>, states: Vec<HypersphericalState>, tolerance: f64) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(Error::Config(format!(
                "trace needs matching, nonempty time and state lists ({} vs {})",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("trace times must be strictly increasing".into()));
        }
        let ints: Vec<[f64; 4]> = states.iter().map(integrals).collect();
        let first = ints[0];
        let residuals = ints
            .iter()
            .map(|v| (0..4).map(|k| (v[k] - first[k]).abs()).fold(0.0, f64::max))
            .collect();
        Ok(Self {
            times,
            states,
            integrals: ints,
            residuals,
            tolerance,
            branch: None,
            clock_j: None,
            exit: None,
            dense: None,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> &HypersphericalState {
        &self.states[0]
    }

    pub fn last(&self) -> &HypersphericalState {
        self.states.last().unwrap()
    }

    pub fn has_dense_output(&self) -> bool {
        self.dense.is_some()
    }

    /// Interpolated state from the integrator's dense output.
    pub fn sample(&self, t: f64) -> Option<HypersphericalState> {
        let d = self.dense.as_ref()?;
        let c0 = self.states[0].c0;
        d.at(t).map(|y| HypersphericalState::from_array(&y, c0))
    }

    pub(crate) fn dense(&self) -> Option<&Solution<8>> {
        self.dense.as_deref()
    }

    /// Resamples on `grid` via dense output.
    pub fn resample(&self, grid: &[f64]) -> Result<GeodesicTrace> {
        let states = grid
            .iter()
            .map(|&t| {
                self.sample(t).ok_or_else(|| {
                    Error::Domain(format!("t = {t} outside the integrated span or no dense output"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = GeodesicTrace::new(grid.to_vec(), states, self.tolerance)?;
        out.exit = self.exit.clone();
        out.dense = self.dense.clone();
        Ok(out)
    }

    /// Largest residual over the trace.
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Component `i` of the state array (see [`HypersphericalState::to_array`]).
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.to_array()[i]).collect()
    }
}

/// Samples of a geodesic on `T*H5`.
#[derive(Debug, Clone)]
pub struct AmbientTrace {
    pub times: Vec<f64>,
    pub states: Vec<CotangentState>,
    pub exit: Option<ChartExit>,
    pub(crate) dense: Option<Arc<Solution<10>>>,
}

impl AmbientTrace {
    pub fn sample(&self, t: f64) -> Option<CotangentState> {
        self.dense.as_ref()?.at(t).map(|y| CotangentState::from_array(&y))
    }

    pub fn last(&self) -> &CotangentState {
        self.states.last().unwrap()
    }
}
