//! Reduction of the geodesic flow to the level set `λ5 = C0 ≠ 0`.
//!
//! Stage one shifts the momenta, `p1 = λ1 + C0 y1`, `p2 = λ2 + C0 y2`,
//! `p3 = λ3`, `p4 = λ4`, which turns `H` into
//!
//! ```text
//!     H_C = ½ (|p|² − W² D),   W = (p3 x1 + p4 x2 − p1 y1 − p2 y2) / D
//! ```
//!
//! with the magnetic bracket `{p_k, p_{k+2}} = C0`. Stage two passes to
//! hyperspherical coordinates
//!
//! ```text
//!     x1 = r cos θ1 cos θ2,   y1 = r cos θ1 sin θ2,
//!     x2 = r sin θ1 cos θ3,   y2 = r sin θ1 sin θ3,
//! ```
//!
//! with momenta carried by the cotangent lift, so `p_r, p_θ` are the
//! components of the same covector. The four integrals are
//!
//! ```text
//!     I1 = p_θ1² + p_θ2²/cos²θ1 + p_θ3²/sin²θ1 − (p_θ2 + p_θ3)²
//!     I2 = p_θ2 + C0 r² cos²θ1 / 2
//!     I3 = p_θ3 + C0 r² sin²θ1 / 2
//!     I4 = H̃_C
//! ```
//!
//! Note on naming: `c0` is always the `λ5` level; the constant term of the
//! radial quartic lives in `classify` as `c_q`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{CotangentState, GroupElement};

/// Distance from `r = 0` and from `θ1 ∈ {0, π/2}` below which the chart is
/// refused.
pub const CHART_TOLERANCE: f64 = 1e-10;

/// Slack allowed on `C1 ≥ 0` before it is treated as a bug.
pub const C1_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedCartesianState {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub c0: f64,
}

impl ReducedCartesianState {
    pub fn from_array(a: &[f64; 8], c0: f64) -> Self {
        Self {
            x1: a[0],
            x2: a[1],
            y1: a[2],
            y2: a[3],
            p1: a[4],
            p2: a[5],
            p3: a[6],
            p4: a[7],
            c0,
        }
    }

    /// `(x1, x2, y1, y2, p1, p2, p3, p4)`.
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.x1, self.x2, self.y1, self.y2, self.p1, self.p2, self.p3, self.p4,
        ]
    }

    fn w(&self) -> f64 {
        let d = 1.0 + self.x1 * self.x1 + self.x2 * self.x2 + self.y1 * self.y1 + self.y2 * self.y2;
        (self.p3 * self.x1 + self.p4 * self.x2 - self.p1 * self.y1 - self.p2 * self.y2) / d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypersphericalState {
    pub r: f64,
    pub th1: f64,
    pub th2: f64,
    pub th3: f64,
    pub pr: f64,
    pub pth1: f64,
    pub pth2: f64,
    pub pth3: f64,
    pub c0: f64,
}

impl HypersphericalState {
    /// Checked constructor: `r` and `θ1` must be inside the open chart.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r: f64,
        th1: f64,
        th2: f64,
        th3: f64,
        pr: f64,
        pth1: f64,
        pth2: f64,
        pth3: f64,
        c0: f64,
    ) -> Result<Self> {
        let s = Self {
            r,
            th1,
            th2,
            th3,
            pr,
            pth1,
            pth2,
            pth3,
            c0,
        };
        s.check_chart()?;
        Ok(s)
    }

    /// `(r, θ1, θ2, θ3, p_r, p_θ1, p_θ2, p_θ3)`; unchecked.
    pub fn from_array(a: &[f64; 8], c0: f64) -> Self {
        Self {
            r: a[0],
            th1: a[1],
            th2: a[2],
            th3: a[3],
            pr: a[4],
            pth1: a[5],
            pth2: a[6],
            pth3: a[7],
            c0,
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.r, self.th1, self.th2, self.th3, self.pr, self.pth1, self.pth2, self.pth3,
        ]
    }

    /// Distance to the nearest chart boundary (`r = 0`, `θ1 = 0`, `θ1 = π/2`).
    pub fn chart_margin(&self) -> f64 {
        self.r.min(self.th1).min(FRAC_PI_2 - self.th1)
    }

    pub fn check_chart(&self) -> Result<()> {
        if !(self.r > CHART_TOLERANCE) {
            return Err(Error::CoordinateSingularity(format!(
                "r = {} is at the origin of the hyperspherical chart",
                self.r
            )));
        }
        if !(self.th1 > CHART_TOLERANCE && self.th1 < FRAC_PI_2 - CHART_TOLERANCE) {
            return Err(Error::CoordinateSingularity(format!(
                "theta1 = {} is outside (0, pi/2)",
                self.th1
            )));
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> f64 {
        hamiltonian_hyper(self)
    }

    pub fn integrals(&self) -> [f64; 4] {
        integrals(self)
    }
}

/// Levels `(C0, …, C4)` of `λ5` and of `I1 … I4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedCharges {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl ConservedCharges {
    pub fn new(c0: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        Self { c0, c1, c2, c3, c4 }
    }

    /// Checks the constraints every genuine charge set obeys.
    pub fn validate(&self) -> Result<()> {
        let all = [self.c0, self.c1, self.c2, self.c3, self.c4];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("charges must be finite: {all:?}")));
        }
        if self.c0 == 0.0 {
            return Err(Error::LevelSet(self.c0));
        }
        if self.c1 < -C1_TOLERANCE {
            return Err(Error::Infeasible(format!(
                "C1 = {} < 0, but C1 >= 0 on every state (Cauchy-Schwarz on p_theta2, p_theta3)",
                self.c1
            )));
        }
        if !(self.c4 > 0.0) {
            return Err(Error::Domain(format!("C4 = {} must be positive", self.c4)));
        }
        Ok(())
    }

    /// `C2 + C3`, the only combination of the two that enters the radial
    /// problem.
    pub fn sigma0(&self) -> f64 {
        self.c2 + self.c3
    }
}

/// Shift onto the level set `λ5 = C0`.
pub fn to_reduced(s: &CotangentState) -> Result<ReducedCartesianState> {
    let c0 = s.lam[4];
    if c0 == 0.0 || !c0.is_finite() {
        return Err(Error::LevelSet(c0));
    }
    let q = &s.q;
    Ok(ReducedCartesianState {
        x1: q.x1,
        x2: q.x2,
        y1: q.y1,
        y2: q.y2,
        p1: s.lam[0] + c0 * q.y1,
        p2: s.lam[1] + c0 * q.y2,
        p3: s.lam[2],
        p4: s.lam[3],
        c0,
    })
}

/// Inverse of [`to_reduced`]; `z` is cyclic and has to be supplied.
pub fn from_reduced(s: &ReducedCartesianState, z: f64) -> CotangentState {
    CotangentState::new(
        GroupElement::new(s.x1, s.x2, s.y1, s.y2, z),
        [
            s.p1 - s.c0 * s.y1,
            s.p2 - s.c0 * s.y2,
            s.p3,
            s.p4,
            s.c0,
        ],
    )
}

#[allow(non_snake_case)]
pub fn hamiltonian_HC(s: &ReducedCartesianState) -> f64 {
    let d = 1.0 + s.x1 * s.x1 + s.x2 * s.x2 + s.y1 * s.y1 + s.y2 * s.y2;
    let n = s.p3 * s.x1 + s.p4 * s.x2 - s.p1 * s.y1 - s.p2 * s.y2;
    0.5 * (s.p1 * s.p1 + s.p2 * s.p2 + s.p3 * s.p3 + s.p4 * s.p4 - n * n / d)
}

/// The W-form of Hamilton's equations on the level set.
#[allow(non_snake_case)]
pub fn rhs_HC(s: &ReducedCartesianState) -> [f64; 8] {
    let w = s.w();
    let cw = s.c0 + w;
    let vx1 = s.p1 + s.y1 * w;
    let vx2 = s.p2 + s.y2 * w;
    let vy1 = s.p3 - s.x1 * w;
    let vy2 = s.p4 - s.x2 * w;
    [vx1, vx2, vy1, vy2, cw * vy1, cw * vy2, -cw * vx1, -cw * vx2]
}

/// Bracket matrix of the shifted variables in the order of
/// [`ReducedCartesianState::to_array`]: canonical pairs `(x_k, p_k)`,
/// `(y_k, p_{k+2})` plus `{p_k, p_{k+2}} = C0`.
pub fn structure_matrix_cartesian(c0: f64) -> [[f64; 8]; 8] {
    let mut m = [[0.0; 8]; 8];
    for (a, b, v) in [(0, 4, 1.0), (1, 5, 1.0), (2, 6, 1.0), (3, 7, 1.0), (4, 6, c0), (5, 7, c0)] {
        m[a][b] = v;
        m[b][a] = -v;
    }
    m
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

pub fn cart_to_hyper(s: &ReducedCartesianState) -> Result<HypersphericalState> {
    let rho1 = s.x1.hypot(s.y1);
    let rho2 = s.x2.hypot(s.y2);
    let r = rho1.hypot(rho2);
    let th1 = rho2.atan2(rho1);
    let th2 = wrap_angle(s.y1.atan2(s.x1));
    let th3 = wrap_angle(s.y2.atan2(s.x2));
    let probe = HypersphericalState::from_array(&[r, th1, th2, th3, 0.0, 0.0, 0.0, 0.0], s.c0);
    probe.check_chart()?;

    let (s1, c1) = th1.sin_cos();
    let (s2, c2) = th2.sin_cos();
    let (s3, c3) = th3.sin_cos();
    let pr = (s.x1 * s.p1 + s.y1 * s.p3 + s.x2 * s.p2 + s.y2 * s.p4) / r;
    let pth1 = -r * s1 * (c2 * s.p1 + s2 * s.p3) + r * c1 * (c3 * s.p2 + s3 * s.p4);
    let pth2 = s.x1 * s.p3 - s.y1 * s.p1;
    let pth3 = s.x2 * s.p4 - s.y2 * s.p2;
    Ok(HypersphericalState {
        pr,
        pth1,
        pth2,
        pth3,
        ..probe
    })
}

pub fn hyper_to_cart(s: &HypersphericalState) -> Result<ReducedCartesianState> {
    s.check_chart()?;
    let (s1, c1) = s.th1.sin_cos();
    let (s2, c2) = s.th2.sin_cos();
    let (s3, c3) = s.th3.sin_cos();
    let (rho1, rho2) = (s.r * c1, s.r * s1);
    // Radial momenta of the two planes, then polar -> Cartesian in each.
    let prho1 = s.pr * c1 - s.pth1 / s.r * s1;
    let prho2 = s.pr * s1 + s.pth1 / s.r * c1;
    let (a1, a2) = (s.pth2 / rho1, s.pth3 / rho2);
    Ok(ReducedCartesianState {
        x1: rho1 * c2,
        y1: rho1 * s2,
        x2: rho2 * c3,
        y2: rho2 * s3,
        p1: prho1 * c2 - a1 * s2,
        p3: prho1 * s2 + a1 * c2,
        p2: prho2 * c3 - a2 * s3,
        p4: prho2 * s3 + a2 * c3,
        c0: s.c0,
    })
}

pub fn hamiltonian_hyper(s: &HypersphericalState) -> f64 {
    let (sn, cs) = s.th1.sin_cos();
    let r2 = s.r * s.r;
    let sig = s.pth2 + s.pth3;
    0.5 * (s.pr * s.pr
        + s.pth1 * s.pth1 / r2
        + (s.pth2 * s.pth2 / (cs * cs) + s.pth3 * s.pth3 / (sn * sn)) / r2
        - sig * sig / (1.0 + r2))
}

/// The bracket table of the reduced hyperspherical variables in the order of
/// [`HypersphericalState::to_array`]. Hamilton's equations are
/// `ξ̇ = M(ξ) ∇H̃(ξ)`.
pub fn structure_matrix(s: &HypersphericalState) -> [[f64; 8]; 8] {
    let (sn, cs) = s.th1.sin_cos();
    let c0 = s.c0;
    let mut m = [[0.0; 8]; 8];
    let mut set = |a: usize, b: usize, v: f64| {
        m[a][b] = v;
        m[b][a] = -v;
    };
    // (r, θ1, θ2, θ3, p_r, p_θ1, p_θ2, p_θ3)
    set(0, 4, 1.0);
    set(1, 5, 1.0);
    set(2, 6, 1.0);
    set(3, 7, 1.0);
    set(4, 6, s.r * c0 * cs * cs);
    set(4, 7, s.r * c0 * sn * sn);
    set(5, 6, -s.r * s.r * c0 * sn * cs);
    set(5, 7, s.r * s.r * c0 * sn * cs);
    m
}

/// Closed-form reduced equations, without chart checks; used as the
/// integrator's right-hand side.
pub fn rhs_hyper_unchecked(s: &HypersphericalState) -> [f64; 8] {
    let (sn, cs) = s.th1.sin_cos();
    let (s2, c2) = (sn * sn, cs * cs);
    let r = s.r;
    let r2 = r * r;
    let d = 1.0 + r2;
    let c0 = s.c0;
    let sig = s.pth2 + s.pth3;
    let (a2, a3) = (s.pth2 / c2, s.pth3 / s2);
    let th2 = a2 / r2 - sig / d;
    let th3 = a3 / r2 - sig / d;
    let pr = (s.pth1 * s.pth1 + s.pth2 * a2 + s.pth3 * a3) / (r2 * r) - r * sig * sig / (d * d)
        + c0 * sig / (r * d);
    let (tn, ct) = (sn / cs, cs / sn);
    let pth1 =
        (s.pth3 * (r2 * c0 + a3) * ct - s.pth2 * (r2 * c0 + a2) * tn) / r2;
    let pth2 = -r * c0 * c2 * s.pr + c0 * sn * cs * s.pth1;
    let pth3 = -r * c0 * s2 * s.pr - c0 * sn * cs * s.pth1;
    [s.pr, s.pth1 / r2, th2, th3, pr, pth1, pth2, pth3]
}

pub fn rhs_hyper(s: &HypersphericalState) -> Result<[f64; 8]> {
    s.check_chart()?;
    Ok(rhs_hyper_unchecked(s))
}

/// `(I1, I2, I3, I4)`.
pub fn integrals(s: &HypersphericalState) -> [f64; 4] {
    let (sn, cs) = s.th1.sin_cos();
    let r2 = s.r * s.r;
    let sig = s.pth2 + s.pth3;
    let i1 = s.pth1 * s.pth1 + s.pth2 * s.pth2 / (cs * cs) + s.pth3 * s.pth3 / (sn * sn)
        - sig * sig;
    let i2 = s.pth2 + 0.5 * s.c0 * r2 * cs * cs;
    let i3 = s.pth3 + 0.5 * s.c0 * r2 * sn * sn;
    [i1, i2, i3, hamiltonian_hyper(s)]
}

pub fn charges_from_state(s: &HypersphericalState) -> Result<ConservedCharges> {
    let [i1, i2, i3, i4] = integrals(s);
    if i1 < -C1_TOLERANCE * (1.0 + i1.abs()) {
        return Err(Error::Invariant(format!(
            "I1 = {i1:e} is negative; C1 >= 0 must hold on every state"
        )));
    }
    Ok(ConservedCharges::new(s.c0, i1.max(0.0), i2, i3, i4))
}

/// `θ1` radicand `p_θ1² = C1 + (C2+C3)² − C2²/cos²θ1 − C3²/sin²θ1`,
/// which does not involve `r`.
pub fn theta1_radicand(c: &ConservedCharges, th1: f64) -> f64 {
    let (sn, cs) = th1.sin_cos();
    let q = c.c1 + c.sigma0() * c.sigma0();
    q - c.c2 * c.c2 / (cs * cs) - c.c3 * c.c3 / (sn * sn)
}

/// A state with the given charges at radius `r0`.
///
/// Conventions: `θ2 = θ3 = 0`; `θ1` maximises the radicand,
/// `tan²θ1 = |C3/C2|` (or `π/4` if either vanishes); `p_θ2`, `p_θ3` come
/// from `I2`, `I3`, `p_θ1` from `I1` and `p_r` from `I4`, with the signs
/// supplied.
pub fn state_from_charges(
    c: &ConservedCharges,
    r0: f64,
    sign_pr: f64,
    sign_pth1: f64,
) -> Result<HypersphericalState> {
    c.validate()?;
    let th1 = if c.c2 != 0.0 && c.c3 != 0.0 {
        (c.c3 / c.c2).abs().sqrt().atan()
    } else {
        FRAC_PI_4
    };
    let probe = HypersphericalState::new(r0, th1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, c.c0)?;
    let rad = theta1_radicand(c, th1);
    let scale = 1.0 + c.c1 + c.sigma0() * c.sigma0();
    if rad < -1e-12 * scale {
        return Err(Error::Infeasible(format!(
            "theta1 radicand is negative ({rad:e}) even at its maximiser: no real state has these charges"
        )));
    }
    let (sn, cs) = th1.sin_cos();
    let r2 = r0 * r0;
    let pth2 = c.c2 - 0.5 * c.c0 * r2 * cs * cs;
    let pth3 = c.c3 - 0.5 * c.c0 * r2 * sn * sn;
    let pth1 = sign_pth1.signum() * rad.max(0.0).sqrt();
    let s = HypersphericalState {
        pth1,
        pth2,
        pth3,
        ..probe
    };
    let pr2 = 2.0 * c.c4 - (hamiltonian_hyper(&s) * 2.0);
    if pr2 < -1e-12 * (1.0 + 2.0 * c.c4) {
        return Err(Error::Infeasible(format!(
            "r0 = {r0} is not admissible: p_r^2 = {pr2:e} < 0 (f(r0) < 0)"
        )));
    }
    Ok(HypersphericalState {
        pr: sign_pr.signum() * pr2.max(0.0).sqrt(),
        ..s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(pr: f64, pth1: f64, pth2: f64, pth3: f64, c0: f64) -> HypersphericalState {
        HypersphericalState::new(1.0, FRAC_PI_4, 0.0, 0.0, pr, pth1, pth2, pth3, c0).unwrap()
    }

    #[test]
    fn hand_values() {
        assert!((hamiltonian_hyper(&st(1.0, 0.0, 0.0, 0.0, 1.0)) - 0.5).abs() < 1e-15);
        let s = st(0.0, 0.0, 1.0, -1.0, 4.0);
        assert!((hamiltonian_hyper(&s) - 2.0).abs() < 1e-14);
        let i = integrals(&s);
        for (a, b) in i.iter().zip([4.0, 2.0, 0.0, 2.0]) {
            assert!((a - b).abs() < 1e-14, "{i:?}");
        }
        let m = structure_matrix(&st(0.0, 0.0, 0.0, 0.0, 4.0));
        assert!((m[4][6] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cartesian_hand_values() {
        let mut s = ReducedCartesianState::from_array(&[0.0; 8], 1.0);
        assert_eq!(hamiltonian_HC(&s), 0.0);
        s.p1 = 1.0;
        s.p2 = 1.0;
        s.p3 = 1.0;
        s.p4 = 1.0;
        assert_eq!(hamiltonian_HC(&s), 2.0);
        let s = ReducedCartesianState::from_array(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0], 1.0);
        assert!((hamiltonian_HC(&s) - 0.25).abs() < 1e-15);
        let lam = CotangentState::new(GroupElement::new(0.0, 0.0, 3.0, 0.0, 0.0), [1.0, 0.0, 0.0, 0.0, 2.0]);
        assert_eq!(to_reduced(&lam).unwrap().p1, 7.0);
        let zero = CotangentState::new(GroupElement::IDENTITY, [1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(to_reduced(&zero), Err(Error::LevelSet(_))));
    }

    #[test]
    fn symmetric_point() {
        let s = ReducedCartesianState::from_array(&[0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0], 1.0);
        let h = cart_to_hyper(&s).unwrap();
        assert!((h.r - 1.0).abs() < 1e-15);
        for a in [h.th1, h.th2, h.th3] {
            assert!((a - FRAC_PI_4).abs() < 1e-15);
        }
    }

    #[test]
    fn chart_boundary_is_refused() {
        let s = ReducedCartesianState::from_array(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0);
        assert!(matches!(cart_to_hyper(&s), Err(Error::CoordinateSingularity(_))));
        assert!(HypersphericalState::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(HypersphericalState::new(0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn frozen_theta1() {
        let d = rhs_hyper(&st(0.3, 0.0, 0.0, 0.0, 2.0)).unwrap();
        assert_eq!(d[0], 0.3);
        assert_eq!(d[1], 0.0);
    }

    #[test]
    fn charges_roundtrip_through_state() {
        let c = ConservedCharges::new(4.0, 4.0, 2.0, 0.0, 2.0);
        let s = state_from_charges(&c, 1.0, 1.0, 1.0).unwrap();
        assert!((s.th1 - FRAC_PI_4).abs() < 1e-15);
        assert!((s.pth2 - 1.0).abs() < 1e-15 && (s.pth3 + 1.0).abs() < 1e-15);
        assert!(s.pr.abs() < 1e-7);
        let back = charges_from_state(&s).unwrap();
        for (a, b) in [
            (back.c1, c.c1),
            (back.c2, c.c2),
            (back.c3, c.c3),
            (back.c4, c.c4),
        ] {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_radicand_stratum() {
        let c = ConservedCharges::new(2.0, 0.0, 0.0, 0.0, 0.5);
        let s = state_from_charges(&c, 1.0, 1.0, 1.0).unwrap();
        assert!((s.th1 - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(s.pth1, 0.0);
    }

    #[test]
    fn infeasible_charges_are_reported() {
        // C1 = 0 with C2 = -C3 != 0: the radicand is negative for every theta1.
        let c = ConservedCharges::new(1.0, 0.0, 0.5, -0.5, 0.5);
        assert!(matches!(
            state_from_charges(&c, 1.0, 1.0, 1.0),
            Err(Error::Infeasible(_))
        ));
        assert!(ConservedCharges::new(0.0, 1.0, 0.0, 0.0, 0.5).validate().is_err());
        assert!(ConservedCharges::new(1.0, -1.0, 0.0, 0.0, 0.5).validate().is_err());
    }
}
