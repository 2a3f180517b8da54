//! Dormand–Prince 5(4) with the PI step-size controller and the order-4
//! continuous extension of Hairer, Nørsett & Wanner (DOPRI5 / CONTD5).

use crate::error::{Error, Result};

use super::IntegratorConfig;

// Autonomous systems only, so the nodes c_i are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FACC1: f64 = 5.0; // largest shrink 1/5
const FACC2: f64 = 0.1; // largest growth 10
const SAFE: f64 = 0.9;

/// One accepted step and its interpolation coefficients.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    rc: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let rc = &self.rc;
        std::array::from_fn(|i| {
            rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])))
        })
    }

    pub fn eval_component(&self, t: f64, i: usize) -> f64 {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let rc = &self.rc;
        rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])))
    }
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub steps: Vec<DenseStep<N>>,
    /// Set when the stop predicate ended the run early.
    pub stopped: Option<String>,
    pub rejected: usize,
}

impl<const N: usize> Solution<N> {
    pub fn t_first(&self) -> f64 {
        self.t[0]
    }

    pub fn t_last(&self) -> f64 {
        *self.t.last().unwrap()
    }

    fn forward(&self) -> bool {
        self.t_last() >= self.t_first()
    }

    /// Index of the step covering `t`; `None` outside the integrated span.
    pub fn locate(&self, t: f64) -> Option<usize> {
        if self.steps.is_empty() {
            return None;
        }
        let (lo, hi) = if self.forward() {
            (self.t_first(), self.t_last())
        } else {
            (self.t_last(), self.t_first())
        };
        if t < lo || t > hi {
            return None;
        }
        let key = |s: &DenseStep<N>| if self.forward() { s.t1() } else { -s.t1() };
        let tk = if self.forward() { t } else { -t };
        let i = self.steps.partition_point(|s| key(s) < tk);
        Some(i.min(self.steps.len() - 1))
    }

    /// Ends the run at `t` inside the last step, e.g. at a polished event.
    pub fn truncate_last(&mut self, t: f64) {
        if let Some(st) = self.steps.last() {
            let y = st.eval(t);
            *self.t.last_mut().unwrap() = t;
            *self.y.last_mut().unwrap() = y;
        }
    }

    /// Dense-output value at `t`.
    pub fn at(&self, t: f64) -> Option<[f64; N]> {
        if self.steps.is_empty() {
            return (t == self.t[0]).then(|| self.y[0]);
        }
        let i = self.locate(t)?;
        if t == self.steps[i].t1() {
            return Some(self.y[i + 1]);
        }
        if t == self.steps[i].t0 {
            return Some(self.y[i]);
        }
        Some(self.steps[i].eval(t))
    }
}

fn weighted_rms<const N: usize>(err: &[f64; N], y: &[f64; N], yn: &[f64; N], cfg: &IntegratorConfig) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sk = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(yn[i].abs());
        s += (err[i] / sk).powi(2);
    }
    (s / N as f64).sqrt()
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

/// Starting step from the local Lipschitz estimate (HNW `HINIT`).
fn initial_step<const N: usize, F>(f: &F, y0: &[f64; N], k1: &[f64; N], dir: f64, cfg: &IntegratorConfig) -> f64
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let sk = |i: usize| cfg.abs_tol + cfg.rel_tol * y0[i].abs();
    let nrm = |v: &[f64; N]| (v.iter().enumerate().map(|(i, x)| (x / sk(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
    let (dn, d0) = (nrm(k1), nrm(y0));
    let mut h = if dn <= 1e-10 || d0 <= 1e-10 { 1e-6 } else { 0.01 * d0 / dn };
    h = h.min(cfg.max_step);
    let y1 = axpy(y0, dir * h, &[(1.0, k1)]);
    let k2 = f(&y1);
    let diff: [f64; N] = std::array::from_fn(|i| k2[i] - k1[i]);
    let der2 = nrm(&diff) / h;
    let der12 = der2.max(dn);
    let h1 = if der12 <= 1e-15 {
        (1e-6f64).max(h * 1e-3)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(cfg.max_step)
}

/// Integrates the autonomous system `y' = f(y)` from `t0` to `t_end`
/// (either direction). `stop` is consulted after every accepted step; a
/// `Some(reason)` ends the run there.
pub fn integrate<const N: usize, F, S>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    cfg: &IntegratorConfig,
    mut stop: S,
) -> Result<Solution<N>>
where
    F: Fn(&[f64; N]) -> [f64; N],
    S: FnMut(&[f64; N]) -> Option<String>,
{
    cfg.validate()?;
    let mut sol = Solution {
        t: vec![t0],
        y: vec![y0],
        steps: Vec::new(),
        stopped: None,
        rejected: 0,
    };
    if t_end == t0 {
        return Ok(sol);
    }
    let dir = (t_end - t0).signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(&y);
    let mut h = cfg.initial_step.unwrap_or_else(|| initial_step(&f, &y, &k1, dir, cfg));
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut nsteps = 0usize;

    loop {
        if nsteps >= cfg.max_steps {
            return Err(Error::Config(format!(
                "step budget of {} exhausted at t = {t}",
                cfg.max_steps
            )));
        }
        nsteps += 1;
        let remaining = (t_end - t).abs();
        if remaining <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
            return Ok(sol);
        }
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h });
        }
        let hs = dir * h;
        let k2 = f(&axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(&axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(&axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(&axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(&axpy(
            &y,
            hs,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ));
        let yn = axpy(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(&yn);
        let errv: [f64; N] = std::array::from_fn(|i| {
            hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let err = weighted_rms(&errv, &y, &yn, cfg);
        if !err.is_finite() {
            // Blew up inside the step: shrink hard and retry.
            h *= 0.1;
            last_rejected = true;
            sol.rejected += 1;
            continue;
        }
        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(FACC2, FACC1);
            let mut hnew = h / fac;
            facold = err.max(1e-4);
            if last_rejected {
                hnew = hnew.min(h);
            }
            let mut rc = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = yn[i] - y[i];
                let bspl = hs * k1[i] - ydiff;
                rc[0][i] = y[i];
                rc[1][i] = ydiff;
                rc[2][i] = bspl;
                rc[3][i] = ydiff - hs * k7[i] - bspl;
                rc[4][i] = hs
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let tn = if last { t_end } else { t + hs };
            let hs_eff = tn - t;
            sol.steps.push(DenseStep { t0: t, h: hs_eff, rc });
            t = tn;
            y = yn;
            k1 = k7;
            sol.t.push(t);
            sol.y.push(y);
            if let Some(reason) = stop(&y) {
                sol.stopped = Some(reason);
                return Ok(sol);
            }
            if last {
                return Ok(sol);
            }
            h = hnew.min(cfg.max_step);
            last_rejected = false;
        } else {
            h /= FACC1.min(fac11 / SAFE);
            last_rejected = true;
            sol.rejected += 1;
        }
    }
}

/// Root of `g` on `[a, b]` (sign change assumed) by the Illinois variant of
/// regula falsi, falling back to bisection; stops at `tol` in the abscissa.
pub fn find_root(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let (mut fa, mut fb) = (g(a), g(b));
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !c.is_finite() || c <= a.min(b) || c >= a.max(b) {
            c = 0.5 * (a + b);
        }
        let fc = g(c);
        if fc == 0.0 {
            return c;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}
