//! Closed-form `t(r)` for the seven cases, its inversion, and the two radial
//! clocks `S = ∫dt/r²` and `J = ∫dt/(1+r²)` the angular quadratures run on.
//!
//! Every case is written as a primitive `G` in the scaled time `τ = ν t`,
//! `ν = sqrt(2C4)`, vanishing at an anchor radius (the inner root of `f`)
//! and increasing outward. `G` is a function of a smooth parameter `x` in
//! which it is convex, so inversion is a bracketed Newton iteration in `x`
//! rather than in `r`, which keeps full accuracy at the turning points.

use std::f64::consts::FRAC_PI_2;

use crate::classify::{classify, profile_from_charges, CaseTag, QuarticProfile, TrajectoryType};
use crate::elliptic::{complete_e, complete_k, ellint_f, jacobi_epsilon, jacobi_sncndn, Modulus};
use crate::error::{Error, Result};
use crate::numint;
use crate::reduction::ConservedCharges;

#[derive(Debug, Clone, Copy)]
enum Form {
    /// `A = 0`: `r² = s* + c sinh²w`, `G = c (sinh w cosh w + w) / (2√B)`.
    Hyperbolic { sqrt_b: f64, c: f64 },
    /// `C_q = 0`, `A = B`: `G = r/√B`.
    Linear { sqrt_b: f64 },
    /// `r² = s* + L sc²u`, `G = P (γu − E(u) + dn sc u)` with
    /// `γ = k'²` (cases b, f) or `γ = 1` (cases c, e).
    Sc {
        l: f64,
        k: Modulus,
        kk: f64,
        p: f64,
        gamma_one: bool,
    },
    /// `β = 1`: `G = sqrt((r² − α²)/A)`.
    Root { a: f64 },
    /// `r² = s1 + L sd²u`, `G = P (E(u) − k² sn cd u)`.
    Sd { l: f64, k: Modulus, kk: f64, p: f64 },
}

/// The closed-form radial primitive of one profile.
#[derive(Debug, Clone)]
pub struct Primitive {
    form: Form,
    a: f64,
    /// Anchor `s* = r*²`: the outer root for type I, `r1²` for type II.
    s_anchor: f64,
    /// `r2²` for type II, `∞` otherwise.
    s_outer: f64,
    /// `f'(s*)` in `s`, so that `f(s) = (s − s*) (A (s − s*) + g0)` for type I.
    g0: f64,
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    g: f64,
    dg: f64,
    /// `s − s*`.
    delta: f64,
    /// `s2 − s` (type II only).
    rest: f64,
}

impl Primitive {
    pub fn new(p: &QuarticProfile) -> Result<Self> {
        let (a, b, c) = (p.a, p.b, p.c_q);
        let unbounded = f64::INFINITY;
        let prim = |form, s_anchor, g0| Primitive {
            form,
            a,
            s_anchor,
            s_outer: unbounded,
            g0,
        };
        match p.case_tag {
            CaseTag::Degenerate => Err(Error::Unsupported(format!(
                "profile ({a}, {b}, {c}) has a double root: only the constant-radius orbit exists"
            ))),
            CaseTag::Infeasible => Err(Error::Infeasible("f(r) < 0 for all r > 0".into())),
            CaseTag::A0 => {
                let s = (-c / b).max(0.0);
                Ok(prim(
                    Form::Hyperbolic {
                        sqrt_b: b.sqrt(),
                        c: 1.0 + s,
                    },
                    s,
                    b,
                ))
            }
            CaseTag::BSmallA | CaseTag::CLargeA => {
                let ar = a / b;
                if (ar - 1.0).abs() < 1e-12 {
                    return Ok(prim(Form::Linear { sqrt_b: b.sqrt() }, 0.0, b));
                }
                let form = if ar < 1.0 {
                    let k = Modulus::from_parameters(1.0 - ar, ar)?;
                    Form::Sc {
                        l: 1.0,
                        k,
                        kk: complete_k(k),
                        p: 1.0 / (b.sqrt() * ar),
                        gamma_one: false,
                    }
                } else {
                    let k = Modulus::from_parameters(1.0 - 1.0 / ar, 1.0 / ar)?;
                    Form::Sc {
                        l: 1.0 / ar,
                        k,
                        kk: complete_k(k),
                        p: 1.0 / a.sqrt(),
                        gamma_one: true,
                    }
                };
                Ok(prim(form, 0.0, b))
            }
            CaseTag::DBetaOne | CaseTag::EBetaLt1 | CaseTag::FBetaGt1 => {
                let al2 = p.roots_sq[1].s.max(0.0);
                let be2 = (-p.roots_sq[0].s).max(0.0);
                let g0 = a * (al2 + be2);
                let form = match p.case_tag {
                    CaseTag::DBetaOne => Form::Root { a },
                    CaseTag::EBetaLt1 => {
                        let k = Modulus::from_parameters((1.0 - be2) / (1.0 + al2), (al2 + be2) / (1.0 + al2))?;
                        Form::Sc {
                            l: al2 + be2,
                            k,
                            kk: complete_k(k),
                            p: (1.0 + al2).sqrt() / a.sqrt(),
                            gamma_one: true,
                        }
                    }
                    _ => {
                        let m1 = (1.0 + al2) / (al2 + be2);
                        let k = Modulus::from_parameters((be2 - 1.0) / (al2 + be2), m1)?;
                        Form::Sc {
                            l: 1.0 + al2,
                            k,
                            kk: complete_k(k),
                            p: (1.0 + al2) / ((a * (al2 + be2)).sqrt() * m1),
                            gamma_one: false,
                        }
                    }
                };
                Ok(prim(form, al2, g0))
            }
            CaseTag::GNegativeA => {
                let s1 = p.roots_sq[0].s.max(0.0);
                let s2 = p.roots_sq[1].s;
                let k = Modulus::from_parameters((s2 - s1) / (1.0 + s2), (1.0 + s1) / (1.0 + s2))?;
                Ok(Primitive {
                    form: Form::Sd {
                        l: (s2 - s1) * k.m1(),
                        k,
                        kk: complete_k(k),
                        p: ((1.0 + s2) / -a).sqrt(),
                    },
                    a,
                    s_anchor: s1,
                    s_outer: s2,
                    g0: a * (s1 - s2),
                })
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.form, Form::Sd { .. })
    }

    pub fn anchor_radius(&self) -> f64 {
        self.s_anchor.sqrt()
    }

    /// `G` at the outer turning radius (type II), `∞` otherwise.
    pub fn half_period(&self) -> f64 {
        match self.form {
            Form::Sd { k, p, .. } => p * complete_e(k),
            _ => f64::INFINITY,
        }
    }

    fn x_max(&self) -> f64 {
        match self.form {
            Form::Sc { kk, .. } | Form::Sd { kk, .. } => kk,
            _ => f64::INFINITY,
        }
    }

    fn eval(&self, x: f64) -> Result<Eval> {
        let nan = f64::NAN;
        Ok(match self.form {
            Form::Hyperbolic { sqrt_b, c } => {
                let (sh, ch) = (x.sinh(), x.cosh());
                Eval {
                    g: c * (sh * ch + x) / (2.0 * sqrt_b),
                    dg: c * ch * ch / sqrt_b,
                    delta: c * sh * sh,
                    rest: nan,
                }
            }
            Form::Linear { sqrt_b } => Eval {
                g: x / sqrt_b,
                dg: 1.0 / sqrt_b,
                delta: x * x,
                rest: nan,
            },
            Form::Root { a } => Eval {
                g: x,
                dg: 1.0,
                delta: a * x * x,
                rest: nan,
            },
            Form::Sc { l, k, p, gamma_one, .. } => {
                let j = jacobi_sncndn(x, k)?;
                if !(j.cn > 0.0) {
                    return Ok(Eval {
                        g: f64::INFINITY,
                        dg: f64::INFINITY,
                        delta: f64::INFINITY,
                        rest: nan,
                    });
                }
                let sc = j.sn / j.cn;
                let nc2 = 1.0 / (j.cn * j.cn);
                let m1 = k.m1();
                let gamma = if gamma_one { 1.0 } else { m1 };
                Eval {
                    g: p * (gamma * x - jacobi_epsilon(x, k)? + j.dn * sc),
                    dg: p * (gamma - m1 + m1 * nc2),
                    delta: l * sc * sc,
                    rest: nan,
                }
            }
            Form::Sd { l, k, p, .. } => {
                let j = jacobi_sncndn(x, k)?;
                let (sd, cd) = (j.sn / j.dn, j.cn / j.dn);
                Eval {
                    g: p * (jacobi_epsilon(x, k)? - k.m() * j.sn * cd),
                    dg: p * k.m1() / (j.dn * j.dn),
                    delta: l * sd * sd,
                    rest: (self.s_outer - self.s_anchor) * cd * cd,
                }
            }
        })
    }

    /// Parameter of the radius `r`, without domain checks beyond clamping.
    fn x_of_r(&self, r: f64) -> Result<f64> {
        let s = r * r;
        let d = (s - self.s_anchor).max(0.0);
        Ok(match self.form {
            Form::Hyperbolic { c, .. } => (d / c).sqrt().asinh(),
            Form::Linear { .. } => r,
            Form::Root { a } => (d / a).sqrt(),
            Form::Sc { l, k, .. } => ellint_f((d / l).sqrt().atan(), k)?,
            Form::Sd { k, .. } => {
                let e = (self.s_outer - s).max(0.0);
                // sc(u) = tanψ / k' with sin²ψ = (s − s1)/(s2 − s1).
                ellint_f(d.sqrt().atan2(k.kc() * e.sqrt()), k)?
            }
        })
    }

    /// Parameter with `G(x) = target`, `0 ≤ target` (`≤ H` for type II).
    fn solve(&self, target: f64) -> Result<f64> {
        if target <= 0.0 {
            return Ok(0.0);
        }
        match self.form {
            Form::Linear { sqrt_b } => return Ok(target * sqrt_b),
            Form::Root { .. } => return Ok(target),
            _ => {}
        }
        if self.is_bounded() && target >= self.half_period() {
            return Ok(self.x_max());
        }
        let (mut lo, mut hi) = (0.0, self.x_max());
        if hi.is_infinite() {
            hi = 1.0;
            while self.eval(hi)?.g < target {
                lo = hi;
                hi *= 2.0;
            }
        }
        // Newton from the anchor slope, kept inside the bracket.
        let mut x = (target / self.eval(0.0)?.dg).clamp(lo, hi);
        for _ in 0..200 {
            let e = self.eval(x)?;
            let f = e.g - target;
            if f == 0.0 {
                return Ok(x);
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut xn = x - f / e.dg;
            if !(xn > lo && xn < hi) {
                xn = 0.5 * (lo + hi);
            }
            if (xn - x).abs() <= 2.0 * f64::EPSILON * x.abs() || hi - lo <= 2.0 * f64::EPSILON * hi {
                return Ok(xn);
            }
            x = xn;
        }
        Ok(x)
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        let slack = 1e-12 * (1.0 + self.s_anchor);
        let s = r * r;
        let ok = r.is_finite()
            && r >= 0.0
            && s >= self.s_anchor - slack
            && (!self.is_bounded() || s <= self.s_outer + 1e-12 * (1.0 + self.s_outer));
        if ok {
            Ok(())
        } else if self.is_bounded() {
            Err(Error::Domain(format!(
                "r = {r} outside the admissible shell [{}, {}]",
                self.s_anchor.sqrt(),
                self.s_outer.sqrt()
            )))
        } else {
            Err(Error::Domain(format!(
                "r = {r} below the turning radius {}",
                self.s_anchor.sqrt()
            )))
        }
    }

    /// `G(r)`: scaled time from the anchor out to `r`.
    pub fn g_of_r(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.eval(self.x_of_r(r)?)?.g)
    }

    /// `r` and `f(r)/(r²(1+r²))` at parameter `x`, computed from the
    /// factored form so the turning points are exact.
    fn radial(&self, x: f64) -> Result<(f64, f64)> {
        let e = self.eval(x)?;
        let s = self.s_anchor + e.delta;
        let (d_over_s, other) = if self.is_bounded() {
            (if s > 0.0 { e.delta / s } else { 1.0 }, -self.a * e.rest)
        } else {
            (if s > 0.0 { e.delta / s } else { 1.0 }, self.a * e.delta + self.g0)
        };
        Ok((s.sqrt(), (d_over_s * other / (1.0 + s)).max(0.0)))
    }

    /// `∫ w(s) dt/dτ dτ` from the anchor out to parameter `x`, in scaled time.
    /// The substitution `s = s* + Δsin²ψ` removes the turning-point
    /// singularity of `dτ/dr`.
    fn clock(&self, x: f64, w: impl Fn(f64) -> f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(0.0);
        }
        let tol = 1e-14;
        if self.is_bounded() {
            let Form::Sd { k, .. } = self.form else { unreachable!() };
            let j = jacobi_sncndn(x, k)?;
            let psi_end = (k.kc() * j.sn).atan2(j.cn);
            let (s1, ds) = (self.s_anchor, self.s_outer - self.s_anchor);
            let sa = (-self.a).sqrt();
            let est = numint::integrate(
                |psi| {
                    let sn = psi.sin();
                    let s = s1 + ds * sn * sn;
                    w(s) * (1.0 + s).sqrt() / sa
                },
                0.0,
                psi_end,
                tol,
                tol,
            );
            return Ok(est.value);
        }
        let delta = self.eval(x)?.delta;
        if delta.is_infinite() {
            return Err(Error::Domain("clock requested at infinite radius".into()));
        }
        let (s0, a, g0) = (self.s_anchor, self.a, self.g0);
        let sd = delta.sqrt();
        let est = numint::integrate(
            |psi| {
                let (sn, cs) = psi.sin_cos();
                let u = delta * sn * sn;
                let s = s0 + u;
                w(s) * (1.0 + s).sqrt() * sd * cs / (a * u + g0).sqrt()
            },
            0.0,
            FRAC_PI_2,
            tol,
            tol,
        );
        Ok(est.value)
    }
}

/// Closed-form `t(r) = t0 ± ∫ r sqrt(1+r²)/sqrt(f) dr` in the profile's own
/// time (the unit-speed time when `C4 = ½`), measured from the anchor root.
pub fn time_of_radius(p: &QuarticProfile, r: f64, sign: f64, t0: f64) -> Result<f64> {
    let prim = Primitive::new(p)?;
    if matches!(p.case_tag, CaseTag::BSmallA | CaseTag::CLargeA) && !(r > 0.0) {
        return Err(Error::Domain(format!("r = {r} must be positive")));
    }
    Ok(t0 + sign.signum() * prim.g_of_r(r)?)
}

/// Radius, momentum and branch at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub r: f64,
    pub p_r: f64,
    /// Type I: `0` incoming, `1` outgoing. Type II: the number of
    /// turning points passed since the reference inner turning.
    pub branch: i64,
    pub outgoing: bool,
}

#[derive(Debug, Clone, Copy)]
struct Located {
    x: f64,
    neg: bool,
    n: i64,
}

/// Which radial clock to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clock {
    /// `S(t) = ∫ dt / r²`.
    InverseSquare,
    /// `J(t) = ∫ dt / (1 + r²)`.
    Conformal,
}

/// `r(t)` on a level set, anchored at an initial radius and direction.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub profile: QuarticProfile,
    pub trajectory: TrajectoryType,
    /// Time of the initial condition.
    pub t0: f64,
    pub r_init: f64,
    pub initial_sign: f64,
    /// `sqrt(2C4)`.
    pub nu: f64,
    prim: Primitive,
    /// Scaled time of the reference turning point relative to `t0`.
    tau_anchor: f64,
    half: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialPath {
    pub times: Vec<f64>,
    pub points: Vec<RadialPoint>,
    /// `J(t) − J(t0)`.
    pub j: Vec<f64>,
    /// `S(t) − S(t0)`; absent when the orbit can reach `r = 0`.
    pub s: Option<Vec<f64>>,
}

impl RadialSolution {
    /// `sign` is the sign of `p_r` at `t0`; it only matters off the turning
    /// points.
    pub fn new(profile: QuarticProfile, nu: f64, r_init: f64, sign: f64, t0: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::Domain(format!("time scale {nu} must be positive")));
        }
        let trajectory = classify(&profile)?;
        let prim = Primitive::new(&profile)?;
        prim.check_radius(r_init)?;
        let g_init = prim.eval(prim.x_of_r(r_init)?)?.g;
        let sign = if sign < 0.0 { -1.0 } else { 1.0 };
        let half = prim.half_period();
        let tau_anchor = match (prim.is_bounded(), sign > 0.0) {
            (false, _) => -sign * g_init,
            (true, true) => -g_init,
            (true, false) => -(2.0 * half - g_init),
        };
        Ok(Self {
            profile,
            trajectory,
            t0,
            r_init,
            initial_sign: sign,
            nu,
            prim,
            tau_anchor,
            half,
        })
    }

    pub fn from_charges(c: &ConservedCharges, r_init: f64, sign: f64, t0: f64) -> Result<Self> {
        let p = profile_from_charges(c)?;
        Self::new(p, (2.0 * c.c4).sqrt(), r_init, sign, t0)
    }

    pub fn primitive(&self) -> &Primitive {
        &self.prim
    }

    /// Radial period (type II).
    pub fn period(&self) -> Option<f64> {
        self.prim
            .is_bounded()
            .then(|| 2.0 * self.half / self.nu)
    }

    /// Turning times in `[t_lo, t_hi]`, ascending.
    pub fn turning_times(&self, t_lo: f64, t_hi: f64) -> Vec<f64> {
        let t_of = |u: f64| self.t0 + (u + self.tau_anchor) / self.nu;
        if !self.prim.is_bounded() {
            let t = t_of(0.0);
            return if self.prim.s_anchor > 0.0 && t >= t_lo && t <= t_hi {
                vec![t]
            } else {
                vec![]
            };
        }
        let u_lo = self.nu * (t_lo - self.t0) - self.tau_anchor;
        let u_hi = self.nu * (t_hi - self.t0) - self.tau_anchor;
        let n0 = (u_lo / self.half).ceil() as i64;
        let n1 = (u_hi / self.half).floor() as i64;
        (n0..=n1)
            .map(|n| t_of(n as f64 * self.half))
            .filter(|&t| t >= t_lo && t <= t_hi)
            .collect()
    }

    fn locate(&self, t: f64) -> Result<Located> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("time {t} is not finite")));
        }
        let u = self.nu * (t - self.t0) - self.tau_anchor;
        if !self.prim.is_bounded() {
            return Ok(Located {
                x: self.prim.solve(u.abs())?,
                neg: u < 0.0,
                n: (u >= 0.0) as i64,
            });
        }
        let n = (u / self.half).floor();
        let rem = (u - n * self.half).clamp(0.0, self.half);
        let n = n as i64;
        let g = if n % 2 == 0 { rem } else { self.half - rem };
        Ok(Located {
            x: self.prim.solve(g)?,
            neg: n % 2 != 0,
            n,
        })
    }

    pub fn radius_at(&self, t: f64) -> Result<RadialPoint> {
        let loc = self.locate(t)?;
        let (r, g) = self.prim.radial(loc.x)?;
        let sgn = if loc.neg { -1.0 } else { 1.0 };
        Ok(RadialPoint {
            r,
            p_r: sgn * self.nu * g.sqrt(),
            branch: loc.n,
            outgoing: !loc.neg,
        })
    }

    fn unfolded(&self, loc: Located, clock: Clock) -> Result<f64> {
        let w = |s: f64| match clock {
            Clock::InverseSquare => 1.0 / s,
            Clock::Conformal => 1.0 / (1.0 + s),
        };
        let phi = self.prim.clock(loc.x, w)? / self.nu;
        if !self.prim.is_bounded() {
            return Ok(if loc.neg { -phi } else { phi });
        }
        let full = self.prim.clock(self.prim.x_max(), w)? / self.nu;
        let n = loc.n as f64;
        Ok(if loc.n % 2 == 0 {
            n * full + phi
        } else {
            (n + 1.0) * full - phi
        })
    }

    /// `S(t) − S(t0)` or `J(t) − J(t0)`.
    pub fn clock(&self, clock: Clock, t: f64) -> Result<f64> {
        if clock == Clock::InverseSquare && self.prim.s_anchor <= 0.0 {
            return Err(Error::Unsupported(
                "S = ∫dt/r² diverges on orbits through r = 0".into(),
            ));
        }
        let base = self.unfolded(self.locate(self.t0)?, clock)?;
        Ok(self.unfolded(self.locate(t)?, clock)? - base)
    }

    /// Samples `r`, `p_r` and the clocks on `times`.
    pub fn path(&self, times: &[f64]) -> Result<RadialPath> {
        let with_s = self.prim.s_anchor > 0.0;
        let l0 = self.locate(self.t0)?;
        let j0 = self.unfolded(l0, Clock::Conformal)?;
        let s0 = if with_s {
            self.unfolded(l0, Clock::InverseSquare)?
        } else {
            0.0
        };
        let mut points = Vec::with_capacity(times.len());
        let mut j = Vec::with_capacity(times.len());
        let mut s = Vec::with_capacity(times.len());
        for &t in times {
            let loc = self.locate(t)?;
            let (r, g) = self.prim.radial(loc.x)?;
            let sgn = if loc.neg { -1.0 } else { 1.0 };
            points.push(RadialPoint {
                r,
                p_r: sgn * self.nu * g.sqrt(),
                branch: loc.n,
                outgoing: !loc.neg,
            });
            j.push(self.unfolded(loc, Clock::Conformal)? - j0);
            if with_s {
                s.push(self.unfolded(loc, Clock::InverseSquare)? - s0);
            }
        }
        Ok(RadialPath {
            times: times.to_vec(),
            points,
            j,
            s: with_s.then_some(s),
        })
    }
}

/// `r(t)` on the solution's stitched branches.
pub fn radius_of_time(sol: &RadialSolution, t: f64) -> Result<f64> {
    Ok(sol.radius_at(t)?.r)
}
