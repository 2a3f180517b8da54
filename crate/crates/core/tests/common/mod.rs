//! Test-only oracles. Nothing here calls into the library's own quadrature,
//! elliptic or ODE code, so agreement with them is an independent check.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn gl_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Recursive bisection with a 20-point rule until the two-level estimates
/// of every panel agree to `tol`, or to roundoff.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let rule = gauss_legendre(20);
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        rule: &[(f64, f64)],
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let l = gl_panel(f, a, m, rule);
        let r = gl_panel(f, m, b, rule);
        let floor = 64.0 * f64::EPSILON * (l.abs() + r.abs());
        if depth > 24 || (l + r - whole).abs() <= tol.max(floor) {
            l + r
        } else {
            rec(f, a, m, l, tol, rule, depth + 1) + rec(f, m, b, r, tol, rule, depth + 1)
        }
    }
    let whole = gl_panel(&f, a, b, &rule);
    rec(&f, a, b, whole, tol, &rule, 0)
}

/// `F(phi, k)` straight from its defining integral.
pub fn oracle_f(phi: f64, k: f64) -> f64 {
    integrate(|v| 1.0 / (1.0 - k * k * v.sin().powi(2)).sqrt(), 0.0, phi, 1e-15)
}

/// `E(phi, k)` straight from its defining integral.
pub fn oracle_e(phi: f64, k: f64) -> f64 {
    integrate(|v| (1.0 - k * k * v.sin().powi(2)).sqrt(), 0.0, phi, 1e-15)
}

/// `∫_lo^r  x sqrt(1+x^2) / sqrt(f(x)) dx` for `f = A x^4 + B x^2 + C`,
/// where `f` has a simple zero at `lo` (or `lo = 0` with `f ~ x^2`).
/// The substitution `x = lo + (r - lo) sin^2 psi` removes the endpoint
/// singularity; `f` is evaluated in factored form around `lo` to avoid
/// cancellation.
pub fn oracle_time(a: f64, b: f64, c: f64, lo: f64, r: f64) -> f64 {
    let len = r - lo;
    let s_lo = lo * lo;
    // f(s) = (s - s_lo) * g(s) with g linear: g(s) = A s + (A s_lo + B)
    let g = |s: f64| a * s + a * s_lo + b;
    debug_assert!((a * s_lo * s_lo + b * s_lo + c).abs() < 1e-9 * (1.0 + b.abs()));
    integrate(
        |psi: f64| {
            let (sp, cp) = psi.sin_cos();
            let d = len * sp * sp;
            let x = lo + d;
            let s = x * x;
            let f = d * (2.0 * lo + d) * g(s);
            if d == 0.0 {
                // limit of the integrand at psi = 0
                let gs = g(s_lo);
                if lo == 0.0 {
                    return 0.0;
                }
                return 2.0 * len.sqrt() * lo * (1.0 + s_lo).sqrt() / (2.0 * lo * gs).sqrt();
            }
            x * (1.0 + s).sqrt() / f.sqrt() * 2.0 * len * sp * cp
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        1e-14,
    )
}

/// Plain sup-norm distance of two equally sampled series.
pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

use h5geo::reduction::{ConservedCharges, HypersphericalState};
use rand::Rng;

/// A state well inside the chart with O(1) momenta and a random level `C0`.
pub fn random_state(rng: &mut impl Rng) -> HypersphericalState {
    let c0 = rng.gen_range(0.5..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    HypersphericalState {
        r: rng.gen_range(0.3..2.0),
        th1: rng.gen_range(0.15..std::f64::consts::FRAC_PI_2 - 0.15),
        th2: rng.gen_range(0.0..std::f64::consts::TAU),
        th3: rng.gen_range(0.0..std::f64::consts::TAU),
        pr: rng.gen_range(-1.0..1.0),
        pth1: rng.gen_range(-1.0..1.0),
        pth2: rng.gen_range(-1.0..1.0),
        pth3: rng.gen_range(-1.0..1.0),
        c0,
    }
}

/// Prescribed arc-length charge sets, one per reachable case.
pub fn case_a() -> ConservedCharges {
    ConservedCharges::new(2.0, 0.5, 0.1, -0.1, 0.5)
}
pub fn case_b() -> ConservedCharges {
    ConservedCharges::new(1.0, 0.0, 0.0, 0.0, 0.5)
}
pub fn case_d() -> ConservedCharges {
    ConservedCharges::new(1.0, 0.5, -0.25, -0.25, 0.5)
}
pub fn case_f() -> ConservedCharges {
    ConservedCharges::new(1.0, 0.52, 0.35, 0.52, 0.5)
}
pub fn case_g() -> ConservedCharges {
    ConservedCharges::new(3.0, 0.2, 0.3, 0.2, 0.5)
}
pub fn case_g_wide() -> ConservedCharges {
    ConservedCharges::new(2.5, 0.91, 0.53, 0.39, 0.5)
}

/// `(A, B, C)` from a factored form `A (s − s1)(s − s2)`.
pub fn from_roots(a: f64, s1: f64, s2: f64) -> (f64, f64, f64) {
    (a, -a * (s1 + s2), a * s1 * s2)
}

/// `s` with every momentum (and `C0`) scaled so that `H = ½`: the same
/// geodesic, parametrised by arc length.
pub fn unit_speed(s: &HypersphericalState) -> HypersphericalState {
    let k = 1.0 / (2.0 * s.hamiltonian()).sqrt();
    let u = HypersphericalState {
        pr: s.pr * k,
        pth1: s.pth1 * k,
        pth2: s.pth2 * k,
        pth3: s.pth3 * k,
        c0: s.c0 * k,
        ..*s
    };
    debug_assert!((u.hamiltonian() - 0.5).abs() < 1e-12);
    u
}
