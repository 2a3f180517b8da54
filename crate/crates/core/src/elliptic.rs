//! Incomplete elliptic integrals of the first and second kind, the Jacobi
//! amplitude and the twelve Jacobi elliptic functions for a real modulus
//! `0 <= k <= 1`.
//!
//! Everything rests on the arithmetic-geometric mean of `1` and `k'`:
//! `F` and `E` come from the descending Landen sequence of amplitudes,
//! `am`/`sn`/`cn`/`dn` from the backward amplitude recursion. Arguments are
//! reduced by the quasi-periods (`F(φ+π) = F(φ) + 2K`, `am(u+2K) = am(u) + π`)
//! before iterating so that large arguments keep full accuracy.
//!
//! Accuracy is about `1e-15` relative for `k <= 0.999`; it degrades slowly as
//! `k -> 1` because `K(k)` grows like `ln(4/k')`. The endpoints `k = 0` and
//! `k = 1` use the trigonometric and hyperbolic closed forms.

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

/// Denominators below this magnitude are reported as poles.
pub const POLE_TOLERANCE: f64 = 1e-13;

const AGM_MAX_ITER: usize = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipticError {
    #[error("invalid modulus {0}: need 0 <= k <= 1")]
    InvalidModulus(f64),
    #[error("invalid parameter pair m = {m}, m1 = {m1}: need m, m1 >= 0 and m + m1 = 1")]
    InvalidParameters { m: f64, m1: f64 },
    #[error("F(phi, k = 1) diverges for |phi| >= pi/2 (phi = {phi})")]
    Divergent { phi: f64 },
    #[error("{func}({u}) is at a pole: denominator {den:e} vanishes")]
    Pole { func: String, u: f64, den: f64 },
    #[error("inverse {func}: value {value} outside the principal range {range}")]
    Domain {
        func: String,
        value: f64,
        range: String,
    },
    #[error("'{0}{0}' is not a Jacobi function (letters must differ)")]
    SameLetters(Letter),
    #[error("argument is not finite: {0}")]
    NonFinite(f64),
}

pub type Result<T> = std::result::Result<T, EllipticError>;

/// Elliptic modulus `k` together with its complement `k' = sqrt(1 - k^2)`.
///
/// Both are stored so callers that know `k'` more accurately than `k` (for
/// example `k' = 1/sqrt(A)` with large `A`) do not lose it to cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    k: f64,
    kc: f64,
}

impl Modulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(EllipticError::InvalidModulus(k));
        }
        Ok(Self {
            k,
            kc: ((1.0 - k) * (1.0 + k)).sqrt(),
        })
    }

    /// Build from the parameter `m = k^2` and the complementary parameter
    /// `m1 = k'^2`. The pair is renormalised so that `m + m1 = 1`.
    pub fn from_parameters(m: f64, m1: f64) -> Result<Self> {
        let total = m + m1;
        if !(m >= 0.0 && m1 >= 0.0 && (total - 1.0).abs() < 1e-8) {
            return Err(EllipticError::InvalidParameters { m, m1 });
        }
        Ok(Self {
            k: (m / total).sqrt(),
            kc: (m1 / total).sqrt(),
        })
    }

    pub fn from_complement(kc: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kc) {
            return Err(EllipticError::InvalidModulus(kc));
        }
        Ok(Self {
            k: ((1.0 - kc) * (1.0 + kc)).sqrt(),
            kc,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kc(&self) -> f64 {
        self.kc
    }

    /// `k^2`
    pub fn m(&self) -> f64 {
        self.k * self.k
    }

    /// `k'^2`
    pub fn m1(&self) -> f64 {
        self.kc * self.kc
    }

    fn is_zero(&self) -> bool {
        self.k == 0.0
    }

    fn is_one(&self) -> bool {
        self.kc == 0.0
    }
}

/// The values `sn`, `cn`, `dn` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    pub u: f64,
    pub k: f64,
}

impl JacobiTriple {
    fn letter(&self, l: Letter) -> f64 {
        match l {
            Letter::S => self.sn,
            Letter::C => self.cn,
            Letter::D => self.dn,
            Letter::N => 1.0,
        }
    }

    /// `pq(u) = p(u) / q(u)` with `n = 1`.
    pub fn ratio(&self, p: Letter, q: Letter) -> Result<f64> {
        if p == q {
            return Err(EllipticError::SameLetters(p));
        }
        let den = self.letter(q);
        if den.abs() < POLE_TOLERANCE {
            return Err(EllipticError::Pole {
                func: format!("{p}{q}"),
                u: self.u,
                den,
            });
        }
        Ok(self.letter(p) / den)
    }
}

/// One of the four letters of the Glaisher notation `pq(u, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    S,
    C,
    D,
    N,
}

impl std::fmt::Display for Letter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self {
            Letter::S => 's',
            Letter::C => 'c',
            Letter::D => 'd',
            Letter::N => 'n',
        };
        write!(f, "{c}")
    }
}

/// AGM sequence of `(1, k')`: `a[n]`, and `c[n] = (a[n-1] - b[n-1]) / 2`
/// with `c[0] = k`. `b` is kept for the Landen amplitude step.
struct Agm {
    a: [f64; AGM_MAX_ITER + 1],
    b: [f64; AGM_MAX_ITER + 1],
    c: [f64; AGM_MAX_ITER + 1],
    n: usize,
}

impl Agm {
    fn new(m: Modulus) -> Self {
        let mut a = [0.0; AGM_MAX_ITER + 1];
        let mut b = [0.0; AGM_MAX_ITER + 1];
        let mut c = [0.0; AGM_MAX_ITER + 1];
        a[0] = 1.0;
        b[0] = m.kc;
        c[0] = m.k;
        let mut n = 0;
        while n < AGM_MAX_ITER && c[n].abs() > f64::EPSILON * a[n] * 0.5 {
            a[n + 1] = 0.5 * (a[n] + b[n]);
            b[n + 1] = (a[n] * b[n]).sqrt();
            c[n + 1] = 0.5 * (a[n] - b[n]);
            n += 1;
        }
        Self { a, b, c, n }
    }

    fn complete_k(&self) -> f64 {
        FRAC_PI_2 / self.a[self.n]
    }

    /// `E(k) / K(k) = 1 - sum 2^(n-1) c_n^2`
    fn e_over_k(&self) -> f64 {
        let mut sum = 0.0;
        let mut pow = 0.5;
        for i in 0..=self.n {
            sum += pow * self.c[i] * self.c[i];
            pow *= 2.0;
        }
        1.0 - sum
    }
}

/// Complete elliptic integral of the first kind `K(k)`; infinite at `k = 1`.
pub fn complete_k(k: Modulus) -> f64 {
    if k.is_one() {
        return f64::INFINITY;
    }
    if k.is_zero() {
        return FRAC_PI_2;
    }
    Agm::new(k).complete_k()
}

/// Complete elliptic integral of the second kind `E(k)`.
pub fn complete_e(k: Modulus) -> f64 {
    if k.is_one() {
        return 1.0;
    }
    if k.is_zero() {
        return FRAC_PI_2;
    }
    let agm = Agm::new(k);
    agm.complete_k() * agm.e_over_k()
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(EllipticError::NonFinite(x))
    }
}

/// Split `phi = m*pi + r` with `r` in `[-pi/2, pi/2]`.
fn reduce_amplitude(phi: f64) -> (f64, f64) {
    let m = (phi / PI).round();
    (m, phi - m * PI)
}

/// `F` and `E` for `0 <= phi <= pi/2` and `0 < k < 1` by Landen's descending
/// transformation of the amplitude.
fn landen_fe(phi: f64, agm: &Agm) -> (f64, f64) {
    let mut ph = phi;
    let mut e_sum = 0.0;
    for i in 0..agm.n {
        let (s, c) = ph.sin_cos();
        let (a, b) = (agm.a[i], agm.b[i]);
        // tan(phi_{n+1} - phi_n) = (b/a) tan(phi_n), written without tan
        // so the branch stays continuous through phi_n = pi/2 + j*pi.
        ph = 2.0 * ph + ((b - a) * s * c / (a * c * c + b * s * s)).atan();
        e_sum += agm.c[i + 1] * ph.sin();
    }
    let f = ph / (2f64.powi(agm.n as i32) * agm.a[agm.n]);
    (f, agm.e_over_k() * f + e_sum)
}

/// Incomplete elliptic integral of the first kind
/// `F(phi, k) = ∫_0^phi dv / sqrt(1 - k^2 sin^2 v)`.
pub fn ellint_f(phi: f64, k: Modulus) -> Result<f64> {
    check_finite(phi)?;
    if k.is_zero() {
        return Ok(phi);
    }
    if k.is_one() {
        if phi.abs() >= FRAC_PI_2 {
            return Err(EllipticError::Divergent { phi });
        }
        return Ok(phi.tan().asinh());
    }
    let (m, r) = reduce_amplitude(phi);
    let agm = Agm::new(k);
    let (f, _) = landen_fe(r.abs(), &agm);
    Ok(2.0 * m * agm.complete_k() + r.signum() * f)
}

/// Incomplete elliptic integral of the second kind
/// `E(phi, k) = ∫_0^phi sqrt(1 - k^2 sin^2 v) dv`.
pub fn ellint_e(phi: f64, k: Modulus) -> Result<f64> {
    check_finite(phi)?;
    if k.is_zero() {
        return Ok(phi);
    }
    let (m, r) = reduce_amplitude(phi);
    if k.is_one() {
        return Ok(2.0 * m + r.sin());
    }
    let agm = Agm::new(k);
    let (_, e) = landen_fe(r.abs(), &agm);
    let ec = agm.complete_k() * agm.e_over_k();
    Ok(2.0 * m * ec + r.signum() * e)
}

/// Both integrals at once, sharing one AGM sequence.
pub fn ellint_fe(phi: f64, k: Modulus) -> Result<(f64, f64)> {
    check_finite(phi)?;
    if k.is_zero() {
        return Ok((phi, phi));
    }
    if k.is_one() {
        return Ok((ellint_f(phi, k)?, ellint_e(phi, k)?));
    }
    let (m, r) = reduce_amplitude(phi);
    let agm = Agm::new(k);
    let (f, e) = landen_fe(r.abs(), &agm);
    let kk = agm.complete_k();
    let s = r.signum();
    Ok((2.0 * m * kk + s * f, 2.0 * m * kk * agm.e_over_k() + s * e))
}

/// Amplitude of `|u| <= K` by the backward recursion
/// `phi_{n-1} = (phi_n + asin(c_n/a_n sin phi_n)) / 2`.
fn am_reduced(u: f64, agm: &Agm) -> f64 {
    let n = agm.n;
    let mut ph = 2f64.powi(n as i32) * agm.a[n] * u;
    for i in (1..=n).rev() {
        ph = 0.5 * (ph + (agm.c[i] / agm.a[i] * ph.sin()).asin());
    }
    ph
}

/// Jacobi amplitude `am(u, k)`, the inverse of `phi -> F(phi, k)`.
pub fn jacobi_am(u: f64, k: Modulus) -> Result<f64> {
    check_finite(u)?;
    if k.is_zero() {
        return Ok(u);
    }
    if k.is_one() {
        // Gudermannian
        return Ok(u.sinh().atan());
    }
    let agm = Agm::new(k);
    let kk = agm.complete_k();
    let m = (u / (2.0 * kk)).round();
    let r = u - 2.0 * m * kk;
    Ok(m * PI + am_reduced(r, &agm))
}

/// `sn`, `cn`, `dn` at `u`.
pub fn jacobi_sncndn(u: f64, k: Modulus) -> Result<JacobiTriple> {
    check_finite(u)?;
    let (sn, cn, dn) = if k.is_zero() {
        let (s, c) = u.sin_cos();
        (s, c, 1.0)
    } else if k.is_one() {
        let sech = 1.0 / u.cosh();
        (u.tanh(), sech, sech)
    } else {
        let agm = Agm::new(k);
        let kk = agm.complete_k();
        let m = (u / (2.0 * kk)).round();
        let r = u - 2.0 * m * kk;
        let (s, c) = am_reduced(r, &agm).sin_cos();
        // sn and cn flip sign every 2K, dn has period 2K.
        let flip = if (m as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
        let dn = (k.m1() + k.m() * c * c).sqrt();
        (flip * s, flip * c, dn)
    };
    Ok(JacobiTriple {
        sn,
        cn,
        dn,
        u,
        k: k.k(),
    })
}

/// `E(u) = E(am u, k) = ∫_0^u dn^2`; the Jacobi epsilon function.
pub fn jacobi_epsilon(u: f64, k: Modulus) -> Result<f64> {
    ellint_e(jacobi_am(u, k)?, k)
}

/// Any of the twelve ratio functions `pq(u, k)`.
pub fn jacobi_ratio(p: Letter, q: Letter, u: f64, k: Modulus) -> Result<f64> {
    if p == q {
        return Err(EllipticError::SameLetters(p));
    }
    jacobi_sncndn(u, k)?.ratio(p, q)
}

/// `sqrt((x - y)(x + y))`, clamped at zero.
fn diff_sq(x: f64, y: f64) -> f64 {
    ((x - y) * (x + y)).max(0.0).sqrt()
}

/// Principal-branch inverse of `pq(., k)`: returns `u` in `[0, K]` with
/// `pq(u, k) = value`.
///
/// Each function is monotone in the amplitude on `[0, pi/2]`, so the value is
/// first turned into an unnormalised `(sin phi, cos phi)` pair and then
/// `u = F(atan2(sin, cos), k)`.
pub fn invert_ratio(p: Letter, q: Letter, value: f64, k: Modulus) -> Result<f64> {
    use Letter::*;
    check_finite(value)?;
    if p == q {
        return Err(EllipticError::SameLetters(p));
    }
    let kc = k.kc();
    let v = value;
    // Allow a few ulps of slack at the ends of each range.
    let slack = 8.0 * f64::EPSILON * v.abs().max(1.0);
    let upper_kc = if kc > 0.0 { 1.0 / kc } else { f64::INFINITY };
    let (lo, hi) = match (p, q) {
        (S, N) | (C, N) | (C, D) => (0.0, 1.0),
        (D, N) => (kc, 1.0),
        (N, S) | (N, C) | (D, C) => (1.0, f64::INFINITY),
        (N, D) => (1.0, upper_kc),
        (S, C) | (C, S) => (0.0, f64::INFINITY),
        (S, D) => (0.0, upper_kc),
        (D, S) => (kc, f64::INFINITY),
        _ => unreachable!(),
    };
    if v < lo - slack || v > hi + slack {
        return Err(EllipticError::Domain {
            func: format!("{p}{q}"),
            value,
            range: format!("[{lo}, {hi}]"),
        });
    }
    let v = v.clamp(lo, hi);
    let (s, c) = match (p, q) {
        (S, N) => (v, diff_sq(1.0, v)),
        (C, N) => (diff_sq(1.0, v), v),
        (D, N) => (diff_sq(1.0, v), diff_sq(v, kc)),
        (N, S) => (1.0, diff_sq(v, 1.0)),
        (N, C) => (diff_sq(v, 1.0), 1.0),
        (N, D) => (diff_sq(v, 1.0), diff_sq(1.0, kc * v)),
        (S, C) => (v, 1.0),
        (C, S) => (1.0, v),
        (S, D) => (v, diff_sq(1.0, kc * v)),
        (D, S) => (1.0, diff_sq(v, kc)),
        (C, D) => (diff_sq(1.0, v), kc * v),
        (D, C) => (diff_sq(v, 1.0), kc),
        _ => unreachable!(),
    };
    ellint_f(s.atan2(c), k)
}
