//! The group H5 in matrix-model coordinates `(x1, x2, y1, y2, z)`,
//!
//! ```text
//!     | 1  x1  x2  z  |
//!     | 0  1   0   y1 |
//!     | 0  0   1   y2 |
//!     | 0  0   0   1  |
//! ```
//!
//! its invariant frames, the left-invariant metric, and the sub-Riemannian
//! Hamiltonian of the left-invariant metric restricted to the right-invariant
//! distribution `D_R = span{∂x_k + y_k ∂z, ∂y_k}`.
//!
//! The Hamiltonian is kept in the compact form
//!
//! ```text
//!     H = ½ (|P|² − (v·P)² / D)
//!     P = (λ1 + y1 λ5, λ2 + y2 λ5, λ3, λ4),  v = (y1, y2, −x1, −x2),
//!     D = 1 + x1² + x2² + y1² + y2²
//! ```
//!
//! which expands to the long quadratic form over `2D`. The Hamilton equations
//! are differentiated from this form by hand; they are not copied from any
//! printed version of the system.

use crate::error::{Error, Result};

/// Horizontal vectors must satisfy `|dz − y1 dx1 − y2 dx2|` below this.
pub const HORIZONTAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GroupElement {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
    pub z: f64,
}

impl GroupElement {
    pub const IDENTITY: Self = Self {
        x1: 0.0,
        x2: 0.0,
        y1: 0.0,
        y2: 0.0,
        z: 0.0,
    };

    pub fn new(x1: f64, x2: f64, y1: f64, y2: f64, z: f64) -> Self {
        Self { x1, x2, y1, y2, z }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.x1, self.x2, self.y1, self.y2, self.z]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    /// `1 + x1² + x2² + y1² + y2²`.
    pub fn denom(&self) -> f64 {
        1.0 + self.x1 * self.x1 + self.x2 * self.x2 + self.y1 * self.y1 + self.y2 * self.y2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentVector {
    pub dx1: f64,
    pub dx2: f64,
    pub dy1: f64,
    pub dy2: f64,
    pub dz: f64,
}

impl TangentVector {
    pub fn new(dx1: f64, dx2: f64, dy1: f64, dy2: f64, dz: f64) -> Self {
        Self {
            dx1,
            dx2,
            dy1,
            dy2,
            dz,
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.dx1, self.dx2, self.dy1, self.dy2, self.dz]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }
}

/// A point of `T*H5`: position and the canonical momenta `λ1..λ5`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CotangentState {
    pub q: GroupElement,
    pub lam: [f64; 5],
}

impl CotangentState {
    pub fn new(q: GroupElement, lam: [f64; 5]) -> Self {
        Self { q, lam }
    }

    /// Flat layout `(x1, x2, y1, y2, z, λ1, …, λ5)` used by the integrator.
    pub fn to_array(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        out[..5].copy_from_slice(&self.q.to_array());
        out[5..].copy_from_slice(&self.lam);
        out
    }

    pub fn from_array(a: &[f64; 10]) -> Self {
        let mut q = [0.0; 5];
        let mut lam = [0.0; 5];
        q.copy_from_slice(&a[..5]);
        lam.copy_from_slice(&a[5..]);
        Self::new(GroupElement::from_array(q), lam)
    }

    pub fn hamiltonian(&self) -> f64 {
        hamiltonian_full(&self.q, &self.lam)
    }
}

/// Matrix product in the 4×4 model:
/// `(x + x', y + y', z + z' + x1 y1' + x2 y2')`.
pub fn multiply(g: &GroupElement, h: &GroupElement) -> GroupElement {
    GroupElement {
        x1: g.x1 + h.x1,
        x2: g.x2 + h.x2,
        y1: g.y1 + h.y1,
        y2: g.y2 + h.y2,
        z: g.z + h.z + g.x1 * h.y1 + g.x2 * h.y2,
    }
}

pub fn inverse(g: &GroupElement) -> GroupElement {
    GroupElement {
        x1: -g.x1,
        x2: -g.x2,
        y1: -g.y1,
        y2: -g.y2,
        z: -g.z + g.x1 * g.y1 + g.x2 * g.y2,
    }
}

/// `L_g*` applied to `∂x1, ∂x2, ∂y1, ∂y2, ∂z`, in that order.
pub fn left_frame(g: &GroupElement) -> [TangentVector; 5] {
    [
        TangentVector::new(1.0, 0.0, 0.0, 0.0, 0.0),
        TangentVector::new(0.0, 1.0, 0.0, 0.0, 0.0),
        TangentVector::new(0.0, 0.0, 1.0, 0.0, g.x1),
        TangentVector::new(0.0, 0.0, 0.0, 1.0, g.x2),
        TangentVector::new(0.0, 0.0, 0.0, 0.0, 1.0),
    ]
}

/// `R_g*` applied to `∂x1, ∂x2, ∂y1, ∂y2, ∂z`; the first four span `D_R`.
pub fn right_frame(g: &GroupElement) -> [TangentVector; 5] {
    [
        TangentVector::new(1.0, 0.0, 0.0, 0.0, g.y1),
        TangentVector::new(0.0, 1.0, 0.0, 0.0, g.y2),
        TangentVector::new(0.0, 0.0, 1.0, 0.0, 0.0),
        TangentVector::new(0.0, 0.0, 0.0, 1.0, 0.0),
        TangentVector::new(0.0, 0.0, 0.0, 0.0, 1.0),
    ]
}

/// The left-invariant Riemannian metric; only `x1, x2` enter.
pub fn metric_tensor(g: &GroupElement) -> [[f64; 5]; 5] {
    let (a, b) = (g.x1, g.x2);
    [
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, a * a + 1.0, a * b, -a],
        [0.0, 0.0, a * b, b * b + 1.0, -b],
        [0.0, 0.0, -a, -b, 1.0],
    ]
}

/// `⟨u, v⟩` under [`metric_tensor`] at `g`.
pub fn inner(g: &GroupElement, u: &TangentVector, v: &TangentVector) -> f64 {
    let m = metric_tensor(g);
    let (u, v) = (u.to_array(), v.to_array());
    let mut s = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            s += u[i] * m[i][j] * v[j];
        }
    }
    s
}

/// `P`, `v·P / D` for the compact form of H.
#[inline]
fn shifted(q: &GroupElement, lam: &[f64; 5]) -> ([f64; 4], f64, f64) {
    let p = [
        lam[0] + q.y1 * lam[4],
        lam[1] + q.y2 * lam[4],
        lam[2],
        lam[3],
    ];
    let d = q.denom();
    let vp = q.y1 * p[0] + q.y2 * p[1] - q.x1 * p[2] - q.x2 * p[3];
    (p, vp / d, d)
}

pub fn hamiltonian_full(q: &GroupElement, lam: &[f64; 5]) -> f64 {
    let (p, s, d) = shifted(q, lam);
    let pp: f64 = p.iter().map(|v| v * v).sum();
    // |P|² − (v·P)²/D ≥ 0 by Cauchy–Schwarz since |v|² < D; clamp roundoff.
    (0.5 * (pp - s * s * d)).max(0.0)
}

/// Hamilton's equations `(∂H/∂λ, −∂H/∂q)` in the flat layout of
/// [`CotangentState::to_array`].
pub fn full_rhs(s: &CotangentState) -> [f64; 10] {
    let q = &s.q;
    let l5 = s.lam[4];
    let (p, w, _) = shifted(q, &s.lam);
    // ∂H/∂λ
    let hx1 = p[0] - w * q.y1;
    let hx2 = p[1] - w * q.y2;
    let hy1 = p[2] + w * q.x1;
    let hy2 = p[3] + w * q.x2;
    let hz = q.y1 * hx1 + q.y2 * hx2;
    // ∂H/∂q
    let dx1 = w * p[2] + w * w * q.x1;
    let dx2 = w * p[3] + w * w * q.x2;
    let dy1 = p[0] * l5 - w * (p[0] + q.y1 * l5) + w * w * q.y1;
    let dy2 = p[1] * l5 - w * (p[1] + q.y2 * l5) + w * w * q.y2;
    [hx1, hx2, hy1, hy2, hz, -dx1, -dx2, -dy1, -dy2, 0.0]
}

/// Velocity `(ẋ1, ẋ2, ẏ1, ẏ2, ż)` of the geodesic through `s`.
pub fn velocity(s: &CotangentState) -> TangentVector {
    let r = full_rhs(s);
    TangentVector::new(r[0], r[1], r[2], r[3], r[4])
}

/// `dz − y1 dx1 − y2 dx2`; vanishes exactly on `D_R(q)`.
pub fn horizontality_defect(q: &GroupElement, v: &TangentVector) -> f64 {
    v.dz - q.y1 * v.dx1 - q.y2 * v.dx2
}

/// Sub-Riemannian length of a horizontal vector.
pub fn sr_speed(q: &GroupElement, v: &TangentVector) -> Result<f64> {
    let defect = horizontality_defect(q, v);
    if defect.abs() > HORIZONTAL_TOLERANCE {
        return Err(Error::NotHorizontal(defect));
    }
    Ok(inner(q, v, v).max(0.0).sqrt())
}
