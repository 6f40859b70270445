//! Constrained dual Bernstein coefficients.
//!
//! The table phi_ij = <B_j^n, D_i^(m,k,l)> projects degree-n Bernstein data
//! onto the constrained degree-m space Pi_m^(k,l) (polynomials whose
//! derivatives of orders 0..k vanish at t=0 and 0..l at t=1). It is computed
//! here by inverting the Gram matrix of {B_(k+1)^m, ..., B_(m-l-1)^m}: the
//! basis is small at the supported sizes, so the O(s^3) factorization is
//! negligible.
//!
//! The same coefficients admit a scaled form
//!
//!   phi_ij = C(m-k-l-2, i-k-1) C(m,i)^-1 C(n,j)
//!            * (alpha+l+2)_(n-j) (beta+k+2)_j
//!              / [ (alpha+l+2)_(l+1) (beta+k+2)_(k+1) ]  *  psi_ij,
//!
//! where the psi-table satisfies a recurrence published elsewhere with cost
//! O(mn). That route is not used here; the relation is recorded so the two
//! parameterizations can be converted if the recurrence is ever added.

use crate::bernstein::{bernstein_pair_inner, JacobiWeight};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Largest reduced degree accepted by default; the Gram matrix condition
/// number grows quickly with m.
pub const MAX_GRAM_DEGREE: usize = 20;

/// Gram matrix of the constrained Bernstein basis of Pi_m^(k,l):
/// entry (s,t) = <B_(k+1+s)^m, B_(k+1+t)^m> for s,t = 0..m-k-l-2.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub m: usize,
    pub k: i32,
    pub l: i32,
    pub w: JacobiWeight,
    pub entries: DMatrix<f64>,
}

/// Validate k,l >= -1 and k + l < m - 1 (nonempty constrained space).
fn check_orders(m: usize, k: i32, l: i32) -> Result<()> {
    if k < -1 || l < -1 {
        return Err(Error::domain(format!("constraint orders must be >= -1, got k={k}, l={l}")));
    }
    if k + l >= m as i32 - 1 {
        return Err(Error::domain(format!(
            "constraint orders violate k + l < m - 1 (k={k}, l={l}, m={m})"
        )));
    }
    Ok(())
}

/// Index range k+1 ..= m-l-1 of the constrained basis, as usizes.
pub fn inner_range(m: usize, k: i32, l: i32) -> std::ops::RangeInclusive<usize> {
    ((k + 1) as usize)..=((m as i32 - l - 1) as usize)
}

pub fn constrained_gram(m: usize, k: i32, l: i32, w: JacobiWeight) -> Result<GramMatrix> {
    check_orders(m, k, l)?;
    if m > MAX_GRAM_DEGREE {
        return Err(Error::domain(format!(
            "reduced degree m={m} exceeds the supported maximum {MAX_GRAM_DEGREE}"
        )));
    }
    let lo = (k + 1) as usize;
    let size = (m as i32 - k - l - 1) as usize;
    let mut g = DMatrix::zeros(size, size);
    for s in 0..size {
        for t in s..size {
            let v = bernstein_pair_inner(m, lo + s, m, lo + t, w)?;
            g[(s, t)] = v;
            g[(t, s)] = v;
        }
    }
    Ok(GramMatrix { m, k, l, w, entries: g })
}

/// Inverse of the Gram matrix via Cholesky; row i holds the coefficients of
/// the dual polynomial D_(k+1+i)^(m,k,l) in the constrained Bernstein basis.
///
/// Returns the inverse together with a condition-number estimate
/// (one-norm of g times one-norm of its inverse).
pub fn dual_coeffs(g: &GramMatrix) -> Result<(DMatrix<f64>, f64)> {
    let chol = nalgebra::Cholesky::new(g.entries.clone()).ok_or_else(|| Error::IllConditioned {
        cond: f64::INFINITY,
        context: format!("Gram matrix for m={}, k={}, l={} is not numerically SPD", g.m, g.k, g.l),
    })?;
    let inv = chol.inverse();
    let cond = one_norm(&g.entries) * one_norm(&inv);
    Ok((inv, cond))
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// The coefficients phi_ij = <B_j^n, D_i^(m,k,l)>, i = k+1..=m-l-1, j = 0..=n.
#[derive(Debug, Clone)]
pub struct PhiTable {
    pub n: usize,
    pub m: usize,
    pub k: i32,
    pub l: i32,
    pub w: JacobiWeight,
    /// Row for inner index i = k+1+row, column j.
    entries: Vec<Vec<f64>>,
    /// Condition estimate of the underlying Gram system.
    pub gram_condition: f64,
}

impl PhiTable {
    /// phi_ij with `i` the absolute control-point index in k+1..=m-l-1.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i - (self.k + 1) as usize][j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i - (self.k + 1) as usize]
    }
}

/// Build the phi table for projecting degree-n data onto Pi_m^(k,l).
///
/// n = m is allowed as a diagnostic case (the table is then the identity on
/// the inner indices).
pub fn phi_table(n: usize, m: usize, k: i32, l: i32, w: JacobiWeight) -> Result<PhiTable> {
    if n < m {
        return Err(Error::domain(format!("phi table requires n >= m, got n={n}, m={m}")));
    }
    let g = constrained_gram(m, k, l, w)?;
    let (c, cond) = dual_coeffs(&g)?;
    let lo = (k + 1) as usize;
    let size = c.nrows();
    // cross inner products <B_j^n, B_t^m>
    let mut cross = vec![vec![0.0; size]; n + 1];
    for (j, row) in cross.iter_mut().enumerate() {
        for (t, v) in row.iter_mut().enumerate() {
            *v = bernstein_pair_inner(n, j, m, lo + t, w)?;
        }
    }
    let mut entries = vec![vec![0.0; n + 1]; size];
    for (r, row) in entries.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = (0..size).map(|t| c[(r, t)] * cross[j][t]).sum();
        }
    }
    Ok(PhiTable { n, m, k, l, w, entries, gram_condition: cond })
}
