//! Shared helpers for the integration tests: an independent quadrature
//! oracle for the weighted inner product, seeded random curve generation,
//! and endpoint geometry probes.

#![allow(dead_code)]

use bezred::bernstein::{BezierCurve, JacobiWeight};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The five weight choices exercised throughout the tests.
pub fn standard_weights() -> Vec<JacobiWeight> {
    [(0.0, 0.0), (0.5, 0.5), (-0.5, 0.5), (0.5, -0.5), (-0.5, -0.5)]
        .into_iter()
        .map(|(a, b)| JacobiWeight::new(a, b).unwrap())
        .collect()
}

/// Integral of (1-t)^alpha t^beta f(t) over [0,1] by adaptive Simpson after
/// the substitution t = sin^2(theta), which removes the endpoint
/// singularities for alpha, beta >= -1/2. Independent of the closed-form
/// inner-product code.
pub fn weighted_integral<F: Fn(f64) -> f64>(f: &F, w: JacobiWeight) -> f64 {
    let g = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let t = s * s;
        2.0 * c.powf(2.0 * w.alpha + 1.0) * s.powf(2.0 * w.beta + 1.0) * f(t)
    };
    adaptive_simpson(&g, 0.0, std::f64::consts::FRAC_PI_2, 1e-13, 40)
}

fn adaptive_simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let whole = simpson(g, a, b);
    recurse(g, a, b, m, g(a), g(m), g(b), whole, tol, depth)
}

fn simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (g(a) + 4.0 * g(m) + g(b))
}

#[allow(clippy::too_many_arguments)]
fn recurse<G: Fn(f64) -> f64>(
    g: &G,
    a: f64,
    b: f64,
    m: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm);
    let frm = g(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        left + right + err / 15.0
    } else {
        recurse(g, a, m, lm, fa, flm, fm, left, tol * 0.5, depth - 1)
            + recurse(g, m, b, rm, fm, frm, fb, right, tol * 0.5, depth - 1)
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random curve with coordinates in [-5, 5].
pub fn random_curve(rng: &mut ChaCha8Rng, degree: usize, dim: usize) -> BezierCurve {
    let pts = (0..=degree)
        .map(|_| (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect();
    BezierCurve::new(pts).unwrap()
}

/// Exact i-th parametric derivative at t=0 or t=1 from the control points:
/// P^(i)(0) = n!/(n-i)! Delta^i p_0, and Delta^i p_(n-i) at t=1.
pub fn endpoint_derivative(c: &BezierCurve, order: usize, at_end: bool) -> Vec<f64> {
    let n = c.degree();
    assert!(order <= n);
    let start = if at_end { n - order } else { 0 };
    let diff = bezred::bernstein::forward_diff(c.points(), order, start).unwrap();
    let factor: f64 = (0..order).map(|j| (n - j) as f64).product();
    diff.into_iter().map(|x| factor * x).collect()
}

/// Signed curvature of a planar curve at an endpoint:
/// cross(P', P'') / |P'|^3.
pub fn endpoint_curvature(c: &BezierCurve, at_end: bool) -> f64 {
    assert_eq!(c.dimension(), 2);
    let d1 = endpoint_derivative(c, 1, at_end);
    let d2 = endpoint_derivative(c, 2, at_end);
    let cross = d1[0] * d2[1] - d1[1] * d2[0];
    let speed = (d1[0] * d1[0] + d1[1] * d1[1]).sqrt();
    cross / speed.powi(3)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Weighted squared L2 distance between two curves by quadrature only.
pub fn quadrature_squared_error(p: &BezierCurve, r: &BezierCurve, w: JacobiWeight) -> f64 {
    let f = |t: f64| {
        let a = p.eval(t);
        let b = r.eval(t);
        a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
    };
    weighted_integral(&f, w)
}
