//! Endpoint-continuity constraints.
//!
//! Geometric continuity of orders (k,l) at the endpoints ties the first k
//! (respectively last l) control points of the reduced curve to the input
//! curve through the endpoint derivatives of a reparametrization,
//! lambda_j = phi^(j)(0) and mu_j = phi^(j)(1). This module builds those
//! boundary control points, their partial derivatives with respect to the
//! continuity parameters, the induced derivatives of the inner control
//! points, and the F forms entering the stationarity system.

use crate::bernstein::{binomial, binomial_row, forward_diff, pochhammer, BezierCurve, JacobiWeight, Point};
use crate::dual::{inner_range, PhiTable};
use crate::error::{Error, Result};

/// Whether a leading continuity parameter is free or pinned to 1
/// (hybrid C^1 continuity at that endpoint).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixing {
    Free,
    FixedOne,
}

/// Continuity orders, hybrid flags and lower bounds for the leading
/// parameters.
#[derive(Debug, Clone, Copy)]
pub struct ContinuitySpec {
    pub k: i32,
    pub l: i32,
    pub p: Fixing,
    pub q: Fixing,
    pub d0: f64,
    pub d1: f64,
}

impl ContinuitySpec {
    pub fn new(k: i32, l: i32) -> Result<Self> {
        let spec = ContinuitySpec { k, l, p: Fixing::Free, q: Fixing::Free, d0: 1e-4, d1: 1e-4 };
        spec.check_orders()?;
        Ok(spec)
    }

    fn check_orders(&self) -> Result<()> {
        if self.k < -1 || self.k > 3 {
            return Err(Error::domain(format!("continuity order k={} outside -1..=3", self.k)));
        }
        if self.l < -1 || self.l > 3 {
            return Err(Error::domain(format!("continuity order l={} outside -1..=3", self.l)));
        }
        Ok(())
    }

    /// Validate against a target degree m and the bound/flag invariants.
    pub fn validate(&self, m: usize) -> Result<()> {
        self.check_orders()?;
        if self.k + self.l >= m as i32 - 1 {
            return Err(Error::domain(format!(
                "constraint orders violate k + l < m - 1 (k={}, l={}, m={m})",
                self.k, self.l
            )));
        }
        // negated form also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.d0 > 0.0) || !(self.d1 > 0.0) {
            return Err(Error::domain(format!(
                "lower bounds must be positive, got d0={}, d1={}",
                self.d0, self.d1
            )));
        }
        if self.p == Fixing::FixedOne && self.k < 2 {
            return Err(Error::domain("fixing phi'(0) = 1 is only meaningful for k >= 2"));
        }
        if self.q == Fixing::FixedOne && self.l < 2 {
            return Err(Error::domain("fixing phi'(1) = 1 is only meaningful for l >= 2"));
        }
        Ok(())
    }
}

/// Geometric continuity parameters: lambda_1..lambda_k and mu_1..mu_l.
#[derive(Debug, Clone, PartialEq)]
pub struct GParams {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
}

impl GParams {
    /// The identity-reparametrization jet (1, 0, 0) truncated to (k, l);
    /// with these values the G construction reproduces C continuity.
    pub fn identity(k: i32, l: i32) -> Self {
        let jet = |o: i32| -> Vec<f64> {
            (0..o.max(0)).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect()
        };
        GParams { lambdas: jet(k), mus: jet(l) }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len() + self.mus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat view [lambda_1..lambda_k, mu_1..mu_l].
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.lambdas.clone();
        v.extend_from_slice(&self.mus);
        v
    }

    pub fn from_vec(x: &[f64], k: i32, _l: i32) -> Self {
        let nk = k.max(0) as usize;
        GParams { lambdas: x[..nk].to_vec(), mus: x[nk..].to_vec() }
    }
}

fn check_boundary_order(order: i32, which: &str) -> Result<()> {
    if order > 3 {
        return Err(Error::domain(format!(
            "continuity order {which}={order} is unsupported (maximum 3)"
        )));
    }
    Ok(())
}

/// Boundary control points r_0..r_k at t=0 as functions of the lambdas.
pub fn start_boundary(
    p: &BezierCurve,
    m: usize,
    k: i32,
    lambdas: &[f64],
) -> Result<Vec<Point>> {
    check_boundary_order(k, "k")?;
    if k < 0 {
        return Ok(vec![]);
    }
    if lambdas.len() != k as usize {
        return Err(Error::domain(format!(
            "expected {k} lambda parameters, got {}",
            lambdas.len()
        )));
    }
    let n = p.degree();
    let pts = p.points();
    let p0 = pts[0].clone();
    let d = p.dimension();
    let mut out = vec![p0.clone()];
    if k >= 1 {
        let dp0 = forward_diff(pts, 1, 0)?;
        let l1 = lambdas[0];
        let nm = n as f64 / m as f64;
        out.push(axpy(&p0, nm * l1, &dp0, d));
        if k >= 2 {
            let d2p0 = forward_diff(pts, 2, 0)?;
            let l2 = lambdas[1];
            let rat2 = pochhammer(n as f64 - 1.0, 2) / pochhammer(m as f64 - 1.0, 2);
            let mut r2 = axpy(&p0, nm * (2.0 * l1 + l2 / (m as f64 - 1.0)), &dp0, d);
            add_scaled(&mut r2, rat2 * l1 * l1, &d2p0);
            out.push(r2);
            if k >= 3 {
                let d3p0 = forward_diff(pts, 3, 0)?;
                let l3 = lambdas[2];
                let rat3 = pochhammer(n as f64 - 2.0, 3) / pochhammer(m as f64 - 2.0, 3);
                let c1 = nm
                    * (3.0 * l1
                        + 3.0 * l2 / (m as f64 - 1.0)
                        + l3 / pochhammer(m as f64 - 2.0, 2));
                let mut r3 = axpy(&p0, c1, &dp0, d);
                add_scaled(&mut r3, 3.0 * rat2 * (l1 * l1 + l1 * l2 / (m as f64 - 2.0)), &d2p0);
                add_scaled(&mut r3, rat3 * l1 * l1 * l1, &d3p0);
                out.push(r3);
            }
        }
    }
    Ok(out)
}

/// Boundary control points r_(m-l)..r_m at t=1, ascending index.
pub fn end_boundary(p: &BezierCurve, m: usize, l: i32, mus: &[f64]) -> Result<Vec<Point>> {
    check_boundary_order(l, "l")?;
    if l < 0 {
        return Ok(vec![]);
    }
    if mus.len() != l as usize {
        return Err(Error::domain(format!("expected {l} mu parameters, got {}", mus.len())));
    }
    let n = p.degree();
    let pts = p.points();
    let pn = pts[n].clone();
    let d = p.dimension();
    // collect r_m, r_(m-1), ... then reverse
    let mut rev = vec![pn.clone()];
    if l >= 1 {
        let dp = forward_diff(pts, 1, n - 1)?;
        let m1 = mus[0];
        let nm = n as f64 / m as f64;
        rev.push(axpy(&pn, -nm * m1, &dp, d));
        if l >= 2 {
            let d2p = forward_diff(pts, 2, n - 2)?;
            let m2 = mus[1];
            let rat2 = pochhammer(n as f64 - 1.0, 2) / pochhammer(m as f64 - 1.0, 2);
            let mut r = axpy(&pn, -nm * (2.0 * m1 - m2 / (m as f64 - 1.0)), &dp, d);
            add_scaled(&mut r, rat2 * m1 * m1, &d2p);
            rev.push(r);
            if l >= 3 {
                let d3p = forward_diff(pts, 3, n - 3)?;
                let m3 = mus[2];
                let rat3 = pochhammer(n as f64 - 2.0, 3) / pochhammer(m as f64 - 2.0, 3);
                let c1 = -nm
                    * (3.0 * m1
                        - 3.0 * m2 / (m as f64 - 1.0)
                        + m3 / pochhammer(m as f64 - 2.0, 2));
                let mut r = axpy(&pn, c1, &dp, d);
                add_scaled(&mut r, 3.0 * rat2 * (m1 * m1 - m1 * m2 / (m as f64 - 2.0)), &d2p);
                add_scaled(&mut r, -rat3 * m1 * m1 * m1, &d3p);
                rev.push(r);
            }
        }
    }
    rev.reverse();
    Ok(rev)
}

fn axpy(base: &[f64], a: f64, x: &[f64], d: usize) -> Point {
    (0..d).map(|h| base[h] + a * x[h]).collect()
}

fn add_scaled(acc: &mut [f64], a: f64, x: &[f64]) {
    for (y, v) in acc.iter_mut().zip(x) {
        *y += a * v;
    }
}

/// Partial derivatives of the start boundary points with respect to
/// lambda_u: returns d r_i / d lambda_u for i = 0..=k.
pub fn start_partials(
    p: &BezierCurve,
    m: usize,
    k: i32,
    lambdas: &[f64],
    u: usize,
) -> Result<Vec<Point>> {
    check_boundary_order(k, "k")?;
    if u == 0 || u as i32 > k {
        return Err(Error::domain(format!("parameter index u={u} outside 1..={k}")));
    }
    let n = p.degree();
    let pts = p.points();
    let d = p.dimension();
    let nm = n as f64 / m as f64;
    let rat2 = pochhammer(n as f64 - 1.0, 2) / pochhammer(m as f64 - 1.0, 2);
    let zero = vec![0.0; d];
    let mut out = vec![zero.clone(); k as usize + 1];
    let dp0 = forward_diff(pts, 1, 0)?;
    match u {
        1 => {
            out[1] = scaled(nm, &dp0);
            if k >= 2 {
                let d2p0 = forward_diff(pts, 2, 0)?;
                let mut v = scaled(2.0 * nm, &dp0);
                add_scaled(&mut v, 2.0 * lambdas[0] * rat2, &d2p0);
                out[2] = v;
                if k >= 3 {
                    let d3p0 = forward_diff(pts, 3, 0)?;
                    let rat3 = pochhammer(n as f64 - 2.0, 3) / pochhammer(m as f64 - 2.0, 3);
                    let mut v = scaled(3.0 * nm, &dp0);
                    add_scaled(
                        &mut v,
                        (2.0 * lambdas[0] + lambdas[1] / (m as f64 - 2.0)) * 3.0 * rat2,
                        &d2p0,
                    );
                    add_scaled(&mut v, 3.0 * lambdas[0] * lambdas[0] * rat3, &d3p0);
                    out[3] = v;
                }
            }
        }
        2 => {
            let c = n as f64 / pochhammer(m as f64 - 1.0, 2);
            out[2] = scaled(c, &dp0);
            if k >= 3 {
                let d2p0 = forward_diff(pts, 2, 0)?;
                let mut v = scaled(3.0 * c, &dp0);
                add_scaled(
                    &mut v,
                    3.0 * lambdas[0] * pochhammer(n as f64 - 1.0, 2)
                        / pochhammer(m as f64 - 2.0, 3),
                    &d2p0,
                );
                out[3] = v;
            }
        }
        3 => {
            out[3] = scaled(n as f64 / pochhammer(m as f64 - 2.0, 3), &dp0);
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Partial derivatives of the end boundary points with respect to mu_v:
/// returns d r_i / d mu_v for i = m-l..=m, ascending index.
pub fn end_partials(
    p: &BezierCurve,
    m: usize,
    l: i32,
    mus: &[f64],
    v: usize,
) -> Result<Vec<Point>> {
    check_boundary_order(l, "l")?;
    if v == 0 || v as i32 > l {
        return Err(Error::domain(format!("parameter index v={v} outside 1..={l}")));
    }
    let n = p.degree();
    let pts = p.points();
    let d = p.dimension();
    let nm = n as f64 / m as f64;
    let rat2 = pochhammer(n as f64 - 1.0, 2) / pochhammer(m as f64 - 1.0, 2);
    let zero = vec![0.0; d];
    // index position of r_(m-i) inside the returned list: l - i
    let mut out = vec![zero.clone(); l as usize + 1];
    let pos = |i: usize| l as usize - i; // offset from the end: r_(m-i)
    let dp = forward_diff(pts, 1, n - 1)?;
    match v {
        1 => {
            out[pos(1)] = scaled(-nm, &dp);
            if l >= 2 {
                let d2p = forward_diff(pts, 2, n - 2)?;
                let mut w = scaled(-2.0 * nm, &dp);
                add_scaled(&mut w, 2.0 * mus[0] * rat2, &d2p);
                out[pos(2)] = w;
                if l >= 3 {
                    let d3p = forward_diff(pts, 3, n - 3)?;
                    let rat3 = pochhammer(n as f64 - 2.0, 3) / pochhammer(m as f64 - 2.0, 3);
                    let mut w = scaled(-3.0 * nm, &dp);
                    add_scaled(
                        &mut w,
                        (2.0 * mus[0] - mus[1] / (m as f64 - 2.0)) * 3.0 * rat2,
                        &d2p,
                    );
                    add_scaled(&mut w, -3.0 * mus[0] * mus[0] * rat3, &d3p);
                    out[pos(3)] = w;
                }
            }
        }
        2 => {
            let c = n as f64 / pochhammer(m as f64 - 1.0, 2);
            out[pos(2)] = scaled(c, &dp);
            if l >= 3 {
                let d2p = forward_diff(pts, 2, n - 2)?;
                let mut w = scaled(3.0 * c, &dp);
                add_scaled(
                    &mut w,
                    -3.0 * mus[0] * pochhammer(n as f64 - 1.0, 2) / pochhammer(m as f64 - 2.0, 3),
                    &d2p,
                );
                out[pos(3)] = w;
            }
        }
        3 => {
            out[pos(3)] = scaled(-(n as f64) / pochhammer(m as f64 - 2.0, 3), &dp);
        }
        _ => unreachable!(),
    }
    Ok(out)
}

fn scaled(a: f64, x: &[f64]) -> Point {
    x.iter().map(|v| a * v).collect()
}

/// Derivatives of the inner control points induced by boundary partials:
///
///   d r_i / d theta = - sum_j C(n,j)^-1 sum_g C(n-m, j-g) C(m,g) phi_ij d r_g / d theta
///
/// `boundary` lists the nonzero boundary partials as (absolute index g,
/// derivative vector). Returns one vector per inner index k+1..=m-l-1.
pub fn inner_partials(phi: &PhiTable, boundary: &[(usize, Point)]) -> Vec<Point> {
    let n = phi.n;
    let m = phi.m;
    let d = boundary.first().map(|(_, v)| v.len()).unwrap_or(0);
    let cn = binomial_row(n);
    let cm = binomial_row(m);
    let cnm = binomial_row(n - m);
    // s_j = C(n,j)^-1 sum_g C(n-m, j-g) C(m,g) d r_g
    let mut s = vec![vec![0.0; d]; n + 1];
    for (j, sj) in s.iter_mut().enumerate() {
        let inv = 1.0 / cn[j];
        for (g, dv) in boundary {
            if *g > j || j - *g > n - m {
                continue;
            }
            add_scaled(sj, cnm[j - *g] * cm[*g] * inv, dv);
        }
    }
    inner_range(m, phi.k, phi.l)
        .map(|i| {
            let mut acc = vec![0.0; d];
            for (j, sj) in s.iter().enumerate() {
                add_scaled(&mut acc, -phi.get(i, j), sj);
            }
            acc
        })
        .collect()
}

/// The F form of the stationarity system:
///
///   F_tj(q) = (alpha+beta+m+2)_t^-1 C(m,j)
///             * sum_i C(t,i) (alpha+1)_(t+m-i-j) (beta+1)_(i+j) q_i
///
/// with t = q.len()-1 and 0 <= j <= m.
pub fn f_form(q: &[f64], j: usize, m: usize, w: JacobiWeight) -> f64 {
    let t = q.len() - 1;
    let a1 = w.alpha + 1.0;
    let b1 = w.beta + 1.0;
    let pre = binomial(m as i64, j as i64) / pochhammer(w.alpha + w.beta + m as f64 + 2.0, t);
    let mut sum = 0.0;
    for (i, &qi) in q.iter().enumerate() {
        if qi == 0.0 {
            continue;
        }
        sum += binomial(t as i64, i as i64)
            * pochhammer(a1, t + m - i - j)
            * pochhammer(b1, i + j)
            * qi;
    }
    pre * sum
}
