//! The analytic pipeline: `r(t)` in closed form, then `θ1`, then `θ2`, `θ3`,
//! then the ambient curve with its `z` coordinate.

pub mod angles;
pub mod audit;
pub mod radial;

pub use angles::{theta1_along, theta23_along, theta23_variant, Theta1Motion, Theta1Path, Theta23Variant};
pub use audit::{audit_theta23, Theta23Audit, VariantError};
pub use radial::{radius_of_time, time_of_radius, Clock, Primitive, RadialPath, RadialPoint, RadialSolution};

use crate::error::{Error, Result};
use crate::heisenberg::CotangentState;
use crate::numint;
use crate::reduction::{charges_from_state, from_reduced, hyper_to_cart, ConservedCharges, HypersphericalState};
use crate::trace::{AmbientTrace, GeodesicTrace};

/// Charges agree with a state's integrals to this relative accuracy.
pub const CHARGE_TOLERANCE: f64 = 1e-9;

fn check_charges(c: &ConservedCharges, init: &HypersphericalState) -> Result<()> {
    c.validate()?;
    let got = charges_from_state(init)?;
    let a = [c.c0, c.c1, c.c2, c.c3, c.c4];
    let b = [got.c0, got.c1, got.c2, got.c3, got.c4];
    for k in 0..5 {
        if (a[k] - b[k]).abs() > CHARGE_TOLERANCE * (1.0 + a[k].abs()) {
            return Err(Error::Invariant(format!(
                "initial state has C{k} = {}, expected {}",
                b[k], a[k]
            )));
        }
    }
    Ok(())
}

/// The analytic solution through `init` at time `t_grid[0]`, sampled on
/// `t_grid`. Momenta come from the integrals, `p_r` from the radial
/// solution.
pub fn geodesic_quadrature(c: &ConservedCharges, init: &HypersphericalState, t_grid: &[f64]) -> Result<GeodesicTrace> {
    if t_grid.is_empty() {
        return Err(Error::Config("empty time grid".into()));
    }
    init.check_chart()?;
    check_charges(c, init)?;
    let sol = RadialSolution::from_charges(c, init.r, init.pr, t_grid[0])?;
    let path = sol.path(t_grid)?;
    let th1 = theta1_along(c, &path, init.th1, init.pth1)?;
    let (th2, th3) = theta23_along(c, &path, &th1, init.th2, init.th3)?;
    let states = (0..t_grid.len())
        .map(|i| {
            let (r, t1) = (path.points[i].r, th1.theta1[i]);
            let (sn, cs) = t1.sin_cos();
            let r2 = r * r;
            HypersphericalState {
                r,
                th1: t1,
                th2: th2[i],
                th3: th3[i],
                pr: path.points[i].p_r,
                pth1: th1.p_theta1[i],
                pth2: c.c2 - 0.5 * c.c0 * r2 * cs * cs,
                pth3: c.c3 - 0.5 * c.c0 * r2 * sn * sn,
                c0: c.c0,
            }
        })
        .collect();
    let mut tr = GeodesicTrace::new(t_grid.to_vec(), states, 1e-10)?;
    tr.branch = Some(path.points.iter().map(|p| p.branch).collect());
    tr.clock_j = Some(path.j);
    Ok(tr)
}

/// `W = (p3 x1 + p4 x2 − p1 y1 − p2 y2) / D`, so that `ż = d(x·y)/2dt − W/2`.
fn w_of(s: &HypersphericalState) -> f64 {
    (s.pth2 + s.pth3) / (1.0 + s.r * s.r)
}

/// Lifts a reduced trace to `T*H5` with `z(t0) = z0`.
///
/// `z = z0 + ½[x·y] − ½∫W dt`, and along a geodesic
/// `W = (C2+C3+C0/2)/(1+r²) − C0/2`, so an exact `J` column makes `z`
/// exact. Without one, `∫W` is integrated on the dense output if present,
/// or by the Hermite rule on the samples.
pub fn reconstruct_ambient(trace: &GeodesicTrace, z0: f64) -> Result<AmbientTrace> {
    let first = trace.first();
    if first.c0 == 0.0 {
        return Err(Error::LevelSet(0.0));
    }
    let carts = trace
        .states
        .iter()
        .map(hyper_to_cart)
        .collect::<Result<Vec<_>>>()?;
    let xy = |k: usize| carts[k].x1 * carts[k].y1 + carts[k].x2 * carts[k].y2;
    let t0 = trace.times[0];
    let int_w: Vec<f64> = if let Some(j) = &trace.clock_j {
        let c = charges_from_state(first)?;
        let kappa = c.sigma0() + 0.5 * c.c0;
        trace
            .times
            .iter()
            .zip(j)
            .map(|(&t, &j)| kappa * j - 0.5 * c.c0 * (t - t0))
            .collect()
    } else {
        let mut acc = vec![0.0];
        for k in 1..trace.len() {
            let (a, b) = (trace.times[k - 1], trace.times[k]);
            let piece = if trace.has_dense_output() {
                numint::integrate(
                    |t| trace.sample(t).map(|s| w_of(&s)).unwrap_or(f64::NAN),
                    a,
                    b,
                    1e-13,
                    1e-12,
                )
                .value
            } else {
                let (sa, sb) = (&trace.states[k - 1], &trace.states[k]);
                let h = b - a;
                let dw = |s: &HypersphericalState| {
                    let r2 = s.r * s.r;
                    // d/dt of (σ − C0 r²/2)/(1+r²) with σ = pθ2 + pθ3 + C0r²/2 fixed.
                    let sig = s.pth2 + s.pth3 + 0.5 * s.c0 * r2;
                    -2.0 * s.r * s.pr * (sig + 0.5 * s.c0) / ((1.0 + r2) * (1.0 + r2))
                };
                0.5 * h * (w_of(sa) + w_of(sb)) + h * h / 12.0 * (dw(sa) - dw(sb))
            };
            acc.push(acc[k - 1] + piece);
        }
        acc
    };
    let xy0 = xy(0);
    let states = (0..trace.len())
        .map(|k| from_reduced(&carts[k], z0 + 0.5 * (xy(k) - xy0) - 0.5 * int_w[k]))
        .collect::<Vec<CotangentState>>();
    Ok(AmbientTrace {
        times: trace.times.clone(),
        states,
        exit: trace.exit.clone(),
        dense: None,
    })
}
