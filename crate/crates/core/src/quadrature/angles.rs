//! `θ1`, `θ2`, `θ3` along a radial path.
//!
//! In the clock `S = ∫dt/r²` the `θ1` motion decouples from `r`: with
//! `w = sin²θ1`, `(dw/dS)² = 4 (−Q w² + (Q − C2² + C3²) w − C3²)` where
//! `Q = C1 + (C2+C3)²`, so `w` oscillates harmonically between the roots
//! `w_lo ≤ w_hi` at frequency `2√Q`, turning points included. Then
//! `∫dt/(r² cos²θ1)` and `∫dt/(r² sin²θ1)` are elementary in `S`, and
//!
//! ```text
//!     θ2 = θ2(t0) + C2 ∫dt/(r²cos²θ1) − (C2 + C3 + C0/2) ∫dt/(1+r²)
//! ```
//!
//! with the symmetric form for `θ3`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::reduction::ConservedCharges;

use super::radial::RadialPath;

/// The `θ1` oscillation in the `S` clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta1Motion {
    /// `sqrt(Q)`.
    pub sqrt_q: f64,
    pub w_lo: f64,
    pub w_hi: f64,
    /// Phase at `S = 0`; `w = w_lo + (w_hi − w_lo) sin²(ψ0 + √Q S)`.
    pub psi0: f64,
    pub w0: f64,
}

impl Theta1Motion {
    /// `sign` is the sign of `p_θ1` at the start; it is irrelevant at the
    /// turning points.
    pub fn new(c: &ConservedCharges, th1_0: f64, sign: f64) -> Result<Self> {
        let (sn, cs) = th1_0.sin_cos();
        let w0 = sn * sn;
        let q = c.c1 + c.sigma0() * c.sigma0();
        let rad = q - c.c2 * c.c2 / (cs * cs) - c.c3 * c.c3 / (sn * sn);
        let scale = 1.0 + q + c.c2 * c.c2 / (cs * cs) + c.c3 * c.c3 / (sn * sn);
        if rad < -1e-12 * scale {
            return Err(Error::Invariant(format!(
                "theta1 radicand {rad:e} < 0 at theta1 = {th1_0}: charges and state disagree"
            )));
        }
        if q <= 0.0 {
            return Ok(Self {
                sqrt_q: 0.0,
                w_lo: w0,
                w_hi: w0,
                psi0: 0.0,
                w0,
            });
        }
        let b = q - c.c2 * c.c2 + c.c3 * c.c3;
        // b² − 4QC3² factored, with the small factor √Q − |C2| − |C3| taken
        // from the exact radicand maximum C1 + 2(C2C3 − |C2C3|).
        let (sq, a2, a3) = (q.sqrt(), c.c2.abs(), c.c3.abs());
        let r_max = c.c1 + 2.0 * (c.c2 * c.c3 - (c.c2 * c.c3).abs());
        let small = (r_max / (sq + a2 + a3)).max(0.0);
        let disc = (small * (sq - a3 + a2) * (sq + a3 - a2) * (sq + a2 + a3)).max(0.0).sqrt();
        let w_hi = (b + disc) / (2.0 * q);
        let w_lo = if b + disc > 0.0 {
            2.0 * c.c3 * c.c3 / (b + disc)
        } else {
            0.0
        };
        let (w_lo, w_hi) = (w_lo.min(w0), w_hi.max(w0));
        let mut psi0 = (w0 - w_lo).max(0.0).sqrt().atan2((w_hi - w0).max(0.0).sqrt());
        if sign < 0.0 {
            psi0 = std::f64::consts::PI - psi0;
        }
        Ok(Self {
            sqrt_q: q.sqrt(),
            w_lo,
            w_hi,
            psi0,
            w0,
        })
    }

    fn is_constant(&self) -> bool {
        self.sqrt_q == 0.0 || self.w_hi - self.w_lo <= 1e-15
    }

    /// `(θ1, p_θ1)` at clock value `s`.
    pub fn at(&self, s: f64) -> (f64, f64) {
        if self.is_constant() {
            let w = self.w0;
            return (w.sqrt().atan2((1.0 - w).sqrt()), 0.0);
        }
        let dw = self.w_hi - self.w_lo;
        let psi = self.psi0 + self.sqrt_q * s;
        let sn = psi.sin();
        let w = (self.w_lo + dw * sn * sn).clamp(0.0, 1.0);
        let th = w.sqrt().atan2((1.0 - w).sqrt());
        let p = dw * self.sqrt_q * (2.0 * psi).sin() / (2.0 * (w * (1.0 - w)).sqrt());
        (th, p)
    }

    /// `(∫ds/cos²θ1, ∫ds/sin²θ1)` from `0` to `s`.
    pub fn sec_csc_integrals(&self, s: f64) -> (f64, f64) {
        if self.is_constant() {
            return (s / (1.0 - self.w0), s / self.w0);
        }
        let dw = self.w_hi - self.w_lo;
        let wm = 0.5 * (self.w_lo + self.w_hi);
        let (phi0, phi) = (2.0 * self.psi0, 2.0 * (self.psi0 + self.sqrt_q * s));
        let k2 = (unwrapped(phi, 1.0 - wm, 0.5 * dw) - unwrapped(phi0, 1.0 - wm, 0.5 * dw)) / (2.0 * self.sqrt_q);
        let k3 = (unwrapped(phi, wm, -0.5 * dw) - unwrapped(phi0, wm, -0.5 * dw)) / (2.0 * self.sqrt_q);
        (k2, k3)
    }
}

/// Continuous primitive of `1/(α + β cos φ)` for `α > |β|`.
fn unwrapped(phi: f64, alpha: f64, beta: f64) -> f64 {
    let root = ((alpha - beta) * (alpha + beta)).max(0.0).sqrt();
    let rho = beta / (alpha + root);
    (phi - 2.0 * (rho * phi.sin()).atan2(1.0 + rho * phi.cos())) / root
}

/// `θ1` and `p_θ1` at each sample of `path`.
#[derive(Debug, Clone, PartialEq)]
pub struct Theta1Path {
    pub motion: Theta1Motion,
    pub theta1: Vec<f64>,
    pub p_theta1: Vec<f64>,
}

/// `θ1` along `path`, starting from `th1_0` with `p_θ1` of sign `sign`.
pub fn theta1_along(c: &ConservedCharges, path: &RadialPath, th1_0: f64, sign: f64) -> Result<Theta1Path> {
    let motion = Theta1Motion::new(c, th1_0, sign)?;
    let n = path.times.len();
    let (theta1, p_theta1) = if motion.is_constant() {
        let (th, p) = motion.at(0.0);
        (vec![th; n], vec![p; n])
    } else {
        let s = path.s.as_ref().ok_or_else(|| {
            Error::Unsupported("theta1 varies but the orbit reaches r = 0".into())
        })?;
        s.iter().map(|&s| motion.at(s)).unzip()
    };
    Ok(Theta1Path {
        motion,
        theta1,
        p_theta1,
    })
}

/// The three printed forms of `θ̇2` (and symmetrically `θ̇3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theta23Variant {
    /// `C2/(r²cos²θ1) − (C2+C3)/(1+r²) − C0`.
    BareC0,
    /// `C2/(r²cos²θ1) − (C2+C3)/(1+r²)`.
    NoC0,
    /// `C2/(r²cos²θ1) − (C2+C3+C0/2)/(1+r²)`, from substituting the
    /// integrals into the reduced equations.
    Substituted,
}

impl Theta23Variant {
    pub const ALL: [Theta23Variant; 3] = [Self::BareC0, Self::NoC0, Self::Substituted];

    pub fn formula(&self) -> &'static str {
        match self {
            Self::BareC0 => "C2/(r^2 cos^2) - (C2+C3)/(1+r^2) - C0",
            Self::NoC0 => "C2/(r^2 cos^2) - (C2+C3)/(1+r^2)",
            Self::Substituted => "C2/(r^2 cos^2) - (C2+C3+C0/2)/(1+r^2)",
        }
    }
}

/// `(θ2, θ3)` along the path with the given rate law.
pub fn theta23_variant(
    c: &ConservedCharges,
    path: &RadialPath,
    th1: &Theta1Path,
    th2_0: f64,
    th3_0: f64,
    variant: Theta23Variant,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if th1.theta1.len() != path.times.len() {
        return Err(Error::Config("theta1 path and radial path differ in length".into()));
    }
    let sig = c.sigma0();
    let (kappa, drift) = match variant {
        Theta23Variant::BareC0 => (sig, c.c0),
        Theta23Variant::NoC0 => (sig, 0.0),
        Theta23Variant::Substituted => (sig + 0.5 * c.c0, 0.0),
    };
    let t0 = path.times[0];
    let mut th2 = Vec::with_capacity(path.times.len());
    let mut th3 = Vec::with_capacity(path.times.len());
    for i in 0..path.times.len() {
        let (k2, k3) = if c.c2 == 0.0 && c.c3 == 0.0 {
            (0.0, 0.0)
        } else {
            let s = path.s.as_ref().ok_or_else(|| {
                Error::Unsupported("angular quadrature needs S = ∫dt/r², which diverges here".into())
            })?;
            th1.motion.sec_csc_integrals(s[i])
        };
        let common = -kappa * path.j[i] - drift * (path.times[i] - t0);
        th2.push(th2_0 + if c.c2 == 0.0 { 0.0 } else { c.c2 * k2 } + common);
        th3.push(th3_0 + if c.c3 == 0.0 { 0.0 } else { c.c3 * k3 } + common);
    }
    Ok((th2, th3))
}

/// `(θ2, θ3)` along the path; the path's first time is the initial time.
pub fn theta23_along(
    c: &ConservedCharges,
    path: &RadialPath,
    th1: &Theta1Path,
    th2_0: f64,
    th3_0: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    theta23_variant(c, path, th1, th2_0, th3_0, Theta23Variant::Substituted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_stratum() {
        let c = ConservedCharges::new(3.0, 0.0, 0.4, 0.4, 0.5);
        let m = Theta1Motion::new(&c, std::f64::consts::FRAC_PI_4, 1.0).unwrap();
        assert!(m.is_constant());
        let (th, p) = m.at(3.0);
        assert!((th - std::f64::consts::FRAC_PI_4).abs() < 1e-15 && p == 0.0);
    }

    #[test]
    fn unwrapped_primitive_matches_its_derivative() {
        let (a, b) = (0.7, -0.45);
        for i in 0..50 {
            let phi = -3.0 + 0.33 * i as f64;
            let h = 1e-5;
            let d = (unwrapped(phi + h, a, b) - unwrapped(phi - h, a, b)) / (2.0 * h);
            assert!((d - 1.0 / (a + b * phi.cos())).abs() < 1e-8);
        }
    }

    #[test]
    fn motion_respects_the_radicand() {
        let c = ConservedCharges::new(3.0, 0.2, 0.3, 0.2, 0.5);
        let m = Theta1Motion::new(&c, 0.7, -1.0).unwrap();
        let q = c.c1 + c.sigma0() * c.sigma0();
        for i in 0..40 {
            let (th, p) = m.at(0.1 * i as f64);
            let (sn, cs) = th.sin_cos();
            let rad = q - c.c2 * c.c2 / (cs * cs) - c.c3 * c.c3 / (sn * sn);
            assert!((p * p - rad).abs() < 1e-12, "{i}: {p} {rad}");
        }
        assert!((m.at(0.0).0 - 0.7).abs() < 1e-14 && m.at(0.0).1 < 0.0);
    }
}
