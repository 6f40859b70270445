//! Combinatorial and evaluation primitives: Bernstein basis, de Casteljau
//! evaluation, degree elevation, Pochhammer symbols, the beta function,
//! forward differences, and the weighted inner-product forms `I_NM`.
//!
//! All quantities are computed in IEEE double precision with incremental
//! products; the supported degree range (n <= 20 by default, see
//! [`crate::reduction::ReductionProblem`]) keeps every intermediate well
//! inside the representable range. Inner products of very high degree
//! (as needed by the scaling diagnostics) switch to a log-space evaluation
//! of the individual terms.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// Coordinate vector of one point, dimension d >= 1.
pub type Point = Vec<f64>;

/// Coefficient sequence indexed 0..=N (one coordinate of a curve, or a
/// generic polynomial in a Bernstein basis).
pub type CoeffSeq = Vec<f64>;

/// Degree pairs beyond this total use log-space term evaluation in the
/// inner-product forms.
const DIRECT_PRODUCT_LIMIT: usize = 60;

/// Binomial coefficient with the convention C(u,v) = 0 for v < 0 or v > u.
pub fn binomial(u: i64, v: i64) -> f64 {
    if v < 0 || v > u {
        return 0.0;
    }
    let v = v.min(u - v);
    let mut acc = 1.0;
    for i in 0..v {
        acc = acc * (u - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Full row C(u, 0..=u), computed incrementally in O(u).
pub fn binomial_row(u: usize) -> Vec<f64> {
    let mut row = vec![1.0; u + 1];
    for j in 1..=u {
        row[j] = row[j - 1] * (u - j + 1) as f64 / j as f64;
    }
    row
}

fn ln_binomial(u: usize, v: usize) -> f64 {
    ln_gamma(u as f64 + 1.0) - ln_gamma(v as f64 + 1.0) - ln_gamma((u - v) as f64 + 1.0)
}

/// Rising factorial (x)_j = x (x+1) ... (x+j-1); (x)_0 = 1.
pub fn pochhammer(x: f64, j: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..j {
        acc *= x + i as f64;
    }
    acc
}

/// ln (x)_j for x > 0, via the log-gamma function.
pub fn ln_pochhammer(x: f64, j: usize) -> f64 {
    ln_gamma(x + j as f64) - ln_gamma(x)
}

/// Beta function B(a,b) = Gamma(a) Gamma(b) / Gamma(a+b), a, b > 0.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::domain(format!(
            "beta function requires positive arguments, got ({a}, {b})"
        )));
    }
    Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}

/// Jacobi weight (1-t)^alpha t^beta with alpha, beta > -1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiWeight {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiWeight {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        // negated form also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(alpha > -1.0) || !(beta > -1.0) {
            return Err(Error::domain(format!(
                "Jacobi weight requires alpha, beta > -1, got ({alpha}, {beta})"
            )));
        }
        Ok(JacobiWeight { alpha, beta })
    }

    /// Legendre weight, alpha = beta = 0.
    pub fn legendre() -> Self {
        JacobiWeight { alpha: 0.0, beta: 0.0 }
    }
}

/// Bernstein basis polynomial B_i^n(t) = C(n,i) t^i (1-t)^(n-i).
pub fn bernstein_eval(i: usize, n: usize, t: f64) -> Result<f64> {
    if i > n {
        return Err(Error::domain(format!("Bernstein index {i} out of range 0..={n}")));
    }
    Ok(binomial(n as i64, i as i64) * t.powi(i as i32) * (1.0 - t).powi((n - i) as i32))
}

/// A Bezier curve of degree n: n+1 control points in R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierCurve {
    points: Vec<Point>,
}

impl BezierCurve {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("a Bezier curve needs at least one control point"));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::domain("control points must have dimension >= 1"));
        }
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::domain("all control points must have the same dimension"));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::domain("control point coordinates must be finite"));
        }
        Ok(BezierCurve { points })
    }

    /// Convenience constructor for scalar-valued (d = 1) curves.
    pub fn scalar(coeffs: &[f64]) -> Result<Self> {
        BezierCurve::new(coeffs.iter().map(|&c| vec![c]).collect())
    }

    pub fn degree(&self) -> usize {
        self.points.len() - 1
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// The h-th coordinates of all control points, as a coefficient sequence.
    pub fn coordinate(&self, h: usize) -> CoeffSeq {
        self.points.iter().map(|p| p[h]).collect()
    }

    /// Evaluate by repeated convex combination (de Casteljau).
    pub fn eval(&self, t: f64) -> Point {
        let mut work = self.points.clone();
        let n = self.degree();
        for level in (1..=n).rev() {
            for i in 0..level {
                for h in 0..work[i].len() {
                    work[i][h] = (1.0 - t) * work[i][h] + t * work[i + 1][h];
                }
            }
        }
        work.truncate(1);
        work.pop().unwrap()
    }

    /// Exact degree elevation to `target` >= current degree.
    ///
    /// Coefficient of B_h^n is  sum_i C(m,i) C(n-m, h-i) / C(n,h) * r_i.
    pub fn elevate(&self, target: usize) -> Result<BezierCurve> {
        let m = self.degree();
        if target < m {
            return Err(Error::domain(format!(
                "cannot elevate degree {m} curve to lower degree {target}"
            )));
        }
        if target == m {
            return Ok(self.clone());
        }
        let n = target;
        let d = self.dimension();
        let cn = binomial_row(n);
        let cm = binomial_row(m);
        let cnm = binomial_row(n - m);
        let mut out = vec![vec![0.0; d]; n + 1];
        for (h, q) in out.iter_mut().enumerate() {
            let inv = 1.0 / cn[h];
            for (i, r) in self.points.iter().enumerate() {
                if i > h || h - i > n - m {
                    continue;
                }
                let c = cm[i] * cnm[h - i];
                if c != 0.0 {
                    for hh in 0..d {
                        q[hh] += c * inv * r[hh];
                    }
                }
            }
        }
        BezierCurve::new(out)
    }

    /// The same point set traversed with t -> 1 - t.
    pub fn reversed(&self) -> BezierCurve {
        let mut pts = self.points.clone();
        pts.reverse();
        BezierCurve { points: pts }
    }
}

/// Forward difference Delta^k q_i of a sequence of points.
pub fn forward_diff(seq: &[Point], order: usize, start: usize) -> Result<Point> {
    if start + order >= seq.len() {
        return Err(Error::domain(format!(
            "forward difference order {order} at index {start} overflows sequence of length {}",
            seq.len()
        )));
    }
    let d = seq[start].len();
    let mut acc = vec![0.0; d];
    // Delta^k q_i = sum_j (-1)^(k-j) C(k,j) q_{i+j}
    for j in 0..=order {
        let sign = if (order - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let c = sign * binomial(order as i64, j as i64);
        for h in 0..d {
            acc[h] += c * seq[start + j][h];
        }
    }
    Ok(acc)
}

/// The weighted inner product of two polynomials given by Bernstein
/// coefficient vectors `a` (degree N) and `b` (degree M):
///
/// I_NM(a,b) = B(alpha+1,beta+1)/(alpha+beta+2)_(N+M)
///             * sum_ij C(N,i) C(M,j) (alpha+1)_(N+M-i-j) (beta+1)_(i+j) a_i b_j
pub fn inner_i(a: &[f64], b: &[f64], w: JacobiWeight) -> f64 {
    let n = a.len() - 1;
    let m = b.len() - 1;
    if n + m > DIRECT_PRODUCT_LIMIT {
        return inner_i_log(a, b, w);
    }
    let a1 = w.alpha + 1.0;
    let b1 = w.beta + 1.0;
    let scale = beta_fn(a1, b1).expect("valid weight") / pochhammer(w.alpha + w.beta + 2.0, n + m);
    let mut sum = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        let cni = binomial(n as i64, i as i64);
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0.0 {
                continue;
            }
            sum += cni
                * binomial(m as i64, j as i64)
                * pochhammer(a1, n + m - i - j)
                * pochhammer(b1, i + j)
                * ai
                * bj;
        }
    }
    scale * sum
}

fn inner_i_log(a: &[f64], b: &[f64], w: JacobiWeight) -> f64 {
    let n = a.len() - 1;
    let m = b.len() - 1;
    let a1 = w.alpha + 1.0;
    let b1 = w.beta + 1.0;
    let ln_scale = ln_gamma(a1) + ln_gamma(b1) - ln_gamma(a1 + b1)
        - ln_pochhammer(w.alpha + w.beta + 2.0, n + m);
    let mut sum = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        let ln_i = ln_binomial(n, i);
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0.0 {
                continue;
            }
            let ln_term = ln_scale
                + ln_i
                + ln_binomial(m, j)
                + ln_pochhammer(a1, n + m - i - j)
                + ln_pochhammer(b1, i + j);
            sum += ln_term.exp() * ai * bj;
        }
    }
    sum
}

/// <B_i^N, B_j^M> under the Jacobi weight: the single (i,j) term of I_NM.
pub fn bernstein_pair_inner(
    n: usize,
    i: usize,
    m: usize,
    j: usize,
    w: JacobiWeight,
) -> Result<f64> {
    if i > n || j > m {
        return Err(Error::domain(format!(
            "Bernstein pair index out of range: ({i},{j}) for degrees ({n},{m})"
        )));
    }
    let a1 = w.alpha + 1.0;
    let b1 = w.beta + 1.0;
    if n + m > DIRECT_PRODUCT_LIMIT {
        let ln_v = ln_gamma(a1) + ln_gamma(b1) - ln_gamma(a1 + b1)
            - ln_pochhammer(w.alpha + w.beta + 2.0, n + m)
            + ln_binomial(n, i)
            + ln_binomial(m, j)
            + ln_pochhammer(a1, n + m - i - j)
            + ln_pochhammer(b1, i + j);
        return Ok(ln_v.exp());
    }
    let scale = beta_fn(a1, b1)? / pochhammer(w.alpha + w.beta + 2.0, n + m);
    Ok(scale
        * binomial(n as i64, i as i64)
        * binomial(m as i64, j as i64)
        * pochhammer(a1, n + m - i - j)
        * pochhammer(b1, i + j))
}
