//! The radial problem. On a level set of the charges
//!
//! ```text
//!     p_r² = 2C4 f(r) / (r² (1 + r²)),   f(r) = A r⁴ + B r² + C_q,
//!     A   = 1 − C0² / (8 C4)
//!     B   = 1 − C1 / (2C4) + (C2 + C3) C0 / (2C4)
//!     C_q = −(C1 + (C2 + C3)²) / (2C4)
//! ```
//!
//! so after the time change `τ = sqrt(2C4) t` the radius obeys
//! `(dr/dτ)² = f(r) / (r²(1+r²))`. `f` is a quadratic in `s = r²`, and the
//! sign pattern of its coefficients and roots gives the seven cases `a`–`g`
//! and the two trajectory types.
//!
//! Note that `A < 1` unless `C0 = 0`, and `C_q = 0` forces `C1 = 0`,
//! `C2 + C3 = 0`, hence `B = 1`: the cases `A > 1` are reachable only from
//! hand-written profiles.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::reduction::ConservedCharges;

/// `|A|` below this is case `a`.
pub const EPS_A: f64 = 1e-12;
/// `|C_q|` below this is one of the `C_q = 0` cases.
pub const EPS_C: f64 = 1e-12;
/// `|β² − 1|` below this is case `d`.
pub const EPS_BETA: f64 = 1e-10;
/// Double root when `|B² − 4AC_q| < EPS_DISC · B²`.
pub const EPS_DISC: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `A = 0`.
    A0,
    /// `A > 0`, `C_q = 0`, `A < 1`.
    BSmallA,
    /// `A > 0`, `C_q = 0`, `A > 1`.
    CLargeA,
    /// `A > 0`, `C_q < 0`, complex roots `±i`.
    DBetaOne,
    /// `A > 0`, `C_q < 0`, complex roots `±iβ` with `β < 1`.
    EBetaLt1,
    /// `A > 0`, `C_q < 0`, complex roots `±iβ` with `β > 1`.
    FBetaGt1,
    /// `A < 0` with two nonnegative roots in `s`.
    GNegativeA,
    Degenerate,
    Infeasible,
}

impl CaseTag {
    pub fn letter(&self) -> &'static str {
        match self {
            CaseTag::A0 => "a",
            CaseTag::BSmallA => "b",
            CaseTag::CLargeA => "c",
            CaseTag::DBetaOne => "d",
            CaseTag::EBetaLt1 => "e",
            CaseTag::FBetaGt1 => "f",
            CaseTag::GNegativeA => "g",
            CaseTag::Degenerate => "degenerate",
            CaseTag::Infeasible => "infeasible",
        }
    }

    pub const ANALYTIC: [CaseTag; 7] = [
        CaseTag::A0,
        CaseTag::BSmallA,
        CaseTag::CLargeA,
        CaseTag::DBetaOne,
        CaseTag::EBetaLt1,
        CaseTag::FBetaGt1,
        CaseTag::GNegativeA,
    ];
}

/// Serialised as its letter, as printed.
impl Serialize for CaseTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.letter())
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootSq {
    pub s: f64,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarticProfile {
    pub a: f64,
    pub b: f64,
    pub c_q: f64,
    /// Real roots of `A s² + B s + C_q` in ascending order (may be negative).
    pub roots_sq: Vec<RootSq>,
    pub case_tag: CaseTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TrajectoryType {
    /// Unbounded motion in `r ≥ r0`.
    TypeI { r0: f64 },
    /// Motion confined to `r1 ≤ r ≤ r2`.
    TypeII { r1: f64, r2: f64 },
}

/// Real roots of `a s² + b s + c` without cancellation.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<RootSq> {
    if a == 0.0 {
        return if b == 0.0 {
            vec![]
        } else {
            vec![RootSq {
                s: -c / b,
                multiplicity: 1,
            }]
        };
    }
    let disc = b * b - 4.0 * a * c;
    if disc.abs() < EPS_DISC * b * b || (b == 0.0 && c == 0.0) {
        return vec![RootSq {
            s: -b / (2.0 * a),
            multiplicity: 2,
        }];
    }
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    // b = 0 gives signum = 1 (or -1 for -0.0): q = ∓sqrt(disc)/2, both fine.
    let mut r = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / a, c / q]
    };
    r.sort_by(|x, y| x.partial_cmp(y).unwrap());
    r.into_iter()
        .map(|s| RootSq { s, multiplicity: 1 })
        .collect()
}

impl QuarticProfile {
    /// Validates `(A, B, C_q)`, solves for the roots and assigns the case.
    pub fn new(a: f64, b: f64, c_q: f64) -> Result<Self> {
        if ![a, b, c_q].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain(format!("non-finite profile ({a}, {b}, {c_q})")));
        }
        if a.abs() < 1e-14 && b.abs() < 1e-14 && c_q.abs() < 1e-14 {
            return Err(Error::Invariant(
                "f is the zero polynomial, which no geodesic produces".into(),
            ));
        }
        if (a - 1.0).abs() <= 1e-12 {
            return Err(Error::Infeasible(format!(
                "A = {a} is excluded: A = 1 requires C0 = 0, which is not a reduction level"
            )));
        }
        if c_q > EPS_C {
            return Err(Error::Invariant(format!(
                "C_q = {c_q} > 0, but C_q = -(C1 + (C2+C3)^2)/(2C4) is never positive"
            )));
        }
        // Snap the measure-zero strata so the roots agree with the tag.
        let a = if a.abs() < EPS_A { 0.0 } else { a };
        let c_q = if c_q.abs() < EPS_C { 0.0 } else { c_q };
        let roots_sq = quadratic_roots(a, b, c_q);
        let mut p = Self {
            a,
            b,
            c_q,
            roots_sq,
            case_tag: CaseTag::Infeasible,
        };
        p.case_tag = p.dispatch();
        Ok(p)
    }

    fn dispatch(&self) -> CaseTag {
        let (a, b, c) = (self.a, self.b, self.c_q);
        if a == 0.0 {
            return if b > 0.0 { CaseTag::A0 } else { CaseTag::Infeasible };
        }
        if self.roots_sq.iter().any(|r| r.multiplicity == 2) {
            return if a > 0.0 || self.roots_sq[0].s >= 0.0 {
                CaseTag::Degenerate
            } else {
                CaseTag::Infeasible
            };
        }
        if a > 0.0 {
            if c == 0.0 && b > 0.0 {
                return if a < 1.0 { CaseTag::BSmallA } else { CaseTag::CLargeA };
            }
            // One root s = α² ≥ 0 and one at s = −β² ≤ 0.
            let beta2 = -self.roots_sq[0].s;
            return if (beta2 - 1.0).abs() < EPS_BETA {
                CaseTag::DBetaOne
            } else if beta2 < 1.0 {
                CaseTag::EBetaLt1
            } else {
                CaseTag::FBetaGt1
            };
        }
        // a < 0: f > 0 somewhere on s > 0 iff both roots are real and s2 > 0.
        match self.roots_sq.as_slice() {
            [lo, hi] if hi.s > 0.0 && lo.s >= 0.0 => CaseTag::GNegativeA,
            _ => CaseTag::Infeasible,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let s = r * r;
        (self.a * s + self.b) * s + self.c_q
    }

    /// `α = sqrt(s_+)` for the cases with a real positive root; the inner
    /// radius `r1` in case `g`.
    pub fn alpha(&self) -> Option<f64> {
        match self.case_tag {
            CaseTag::DBetaOne | CaseTag::EBetaLt1 | CaseTag::FBetaGt1 => {
                Some(self.roots_sq[1].s.max(0.0).sqrt())
            }
            CaseTag::GNegativeA => Some(self.roots_sq[0].s.max(0.0).sqrt()),
            _ => None,
        }
    }

    /// `β`: the imaginary root `±iβ` in `d`–`f`, the outer radius `r2` in `g`.
    pub fn beta(&self) -> Option<f64> {
        match self.case_tag {
            CaseTag::DBetaOne | CaseTag::EBetaLt1 | CaseTag::FBetaGt1 => {
                Some((-self.roots_sq[0].s).max(0.0).sqrt())
            }
            CaseTag::GNegativeA => Some(self.roots_sq[1].s.sqrt()),
            _ => None,
        }
    }

    /// Remarks on strata the case theorem does not spell out.
    pub fn notes(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.case_tag == CaseTag::DBetaOne && self.a <= 1.0 {
            out.push(format!(
                "beta = 1 with A = {} <= 1: dispatched to case d on beta alone",
                self.a
            ));
        }
        if self.case_tag == CaseTag::GNegativeA && self.roots_sq[0].s == 0.0 {
            out.push("inner radius r1 = 0 is the chart singularity; the orbit is treated on (0, r2]".into());
        }
        if matches!(self.case_tag, CaseTag::BSmallA | CaseTag::CLargeA) && self.b != 1.0 {
            out.push(format!("C_q = 0 with B = {} != 1: no geodesic has this profile", self.b));
        }
        out
    }
}

/// `A, B, C_q` from the charges; `C4` is the energy level.
pub fn profile_from_charges(c: &ConservedCharges) -> Result<QuarticProfile> {
    if !(c.c4 > 0.0) {
        return Err(Error::Domain(format!("C4 = {} must be positive", c.c4)));
    }
    if c.c0 == 0.0 {
        return Err(Error::LevelSet(c.c0));
    }
    let two_c4 = 2.0 * c.c4;
    let sig = c.sigma0();
    let a = 1.0 - c.c0 * c.c0 / (4.0 * two_c4);
    let b = 1.0 - c.c1 / two_c4 + sig * c.c0 / two_c4;
    let c_q = -(c.c1 + sig * sig) / two_c4;
    QuarticProfile::new(a, b, c_q)
}

/// Nonnegative roots of `f` as radii, with multiplicity.
pub fn solve_radial_roots(p: &QuarticProfile) -> Vec<(f64, u8)> {
    p.roots_sq
        .iter()
        .filter(|r| r.s >= 0.0)
        // + 0.0 turns a −0.0 root into 0.0
        .map(|r| ((r.s + 0.0).sqrt(), r.multiplicity))
        .collect()
}

pub fn case_tag(p: &QuarticProfile) -> CaseTag {
    p.case_tag
}

pub fn classify(p: &QuarticProfile) -> Result<TrajectoryType> {
    match p.case_tag {
        CaseTag::Infeasible => Err(Error::Infeasible("f(r) < 0 for all r > 0".into())),
        CaseTag::Degenerate => {
            let s = p.roots_sq[0].s.max(0.0);
            Err(Error::Degenerate { r_star: s.sqrt() })
        }
        CaseTag::GNegativeA => Ok(TrajectoryType::TypeII {
            r1: p.roots_sq[0].s.max(0.0).sqrt(),
            r2: p.roots_sq[1].s.sqrt(),
        }),
        _ => {
            let r0 = solve_radial_roots(p)
                .iter()
                .map(|r| r.0)
                .fold(0.0, f64::max);
            Ok(TrajectoryType::TypeI { r0 })
        }
    }
}

impl TrajectoryType {
    /// Whether `r` lies in the admissible set, with slack `tol`.
    pub fn admits(&self, r: f64, tol: f64) -> bool {
        match *self {
            TrajectoryType::TypeI { r0 } => r >= r0 - tol,
            TrajectoryType::TypeII { r1, r2 } => r >= r1 - tol && r <= r2 + tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(a: f64, b: f64, c: f64) -> QuarticProfile {
        QuarticProfile::new(a, b, c).unwrap()
    }

    #[test]
    fn coefficients_from_charges() {
        let p = profile_from_charges(&ConservedCharges::new(2.0, 0.5, 0.1, -0.1, 0.5)).unwrap();
        assert!(p.a.abs() < 1e-15 && (p.b - 0.5).abs() < 1e-15 && (p.c_q + 0.5).abs() < 1e-15);
        assert_eq!(p.case_tag, CaseTag::A0);
        let p = profile_from_charges(&ConservedCharges::new(3.0, 0.0, 0.4, -0.4, 0.5)).unwrap();
        assert_eq!(p.c_q, 0.0);
        assert!((p.b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn roots() {
        assert_eq!(solve_radial_roots(&prof(0.0, 0.5, -0.5)), vec![(1.0, 1)]);
        assert_eq!(solve_radial_roots(&prof(-1.0, 1.0, 0.0)), vec![(0.0, 1), (1.0, 1)]);
        assert!(solve_radial_roots(&prof(-1.0, 1.0, -1.0)).is_empty());
    }

    #[test]
    fn trajectory_types() {
        assert_eq!(classify(&prof(0.0, 0.5, -0.5)).unwrap(), TrajectoryType::TypeI { r0: 1.0 });
        assert_eq!(
            classify(&prof(-1.0, 1.0, 0.0)).unwrap(),
            TrajectoryType::TypeII { r1: 0.0, r2: 1.0 }
        );
        assert_eq!(classify(&prof(2.0, 1.0, 0.0)).unwrap(), TrajectoryType::TypeI { r0: 0.0 });
        assert!(matches!(classify(&prof(0.0, -3.0, -4.0)), Err(Error::Infeasible(_))));
        assert!(matches!(classify(&prof(-1.0, 2.0, -1.0)), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn tags() {
        let d = prof(2.0, 0.0, -2.0);
        assert_eq!(d.case_tag, CaseTag::DBetaOne);
        assert!((d.alpha().unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(prof(0.5, 1.0, 0.0).case_tag, CaseTag::BSmallA);
        assert_eq!(prof(2.0, 1.0, 0.0).case_tag, CaseTag::CLargeA);
        assert_eq!(prof(-1.0, 1.0, 0.0).case_tag, CaseTag::GNegativeA);
        // (s − 1)(s + 1/4) and (s − 1)(s + 4)
        assert_eq!(prof(1.5, -1.125, -0.375).case_tag, CaseTag::EBetaLt1);
        assert_eq!(prof(0.5, 1.5, -2.0).case_tag, CaseTag::FBetaGt1);
    }

    #[test]
    fn invalid_profiles() {
        assert!(QuarticProfile::new(1.0, 0.0, -1.0).is_err());
        assert!(QuarticProfile::new(0.5, 1.0, 0.1).is_err());
        assert!(QuarticProfile::new(0.0, 0.0, 0.0).is_err());
    }
}
