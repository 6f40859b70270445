//! Small dense solvers for the continuity-parameter subproblems.
//!
//! The parameter space has at most six variables, bounded below only in the
//! leading components, with a smooth polynomial objective. An affine-residual
//! linear solve covers the quadratic cases and a projected Newton iteration
//! with a finite-difference Hessian covers the quartic/sextic ones.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Outcome bookkeeping shared by all parameter solvers.
#[derive(Debug, Clone, Default)]
pub struct SolveDiag {
    pub iterations: usize,
    /// Indices (into the flat parameter vector) whose lower bound is active.
    pub active_bounds: Vec<usize>,
    pub converged: bool,
    pub final_residual: f64,
    pub warnings: Vec<String>,
}

/// Solve `residual(x) = 0` over the coordinates `free`, where the residual
/// restricted to those coordinates is an affine function of them. The affine
/// map is recovered exactly from samples at unit offsets; one refinement pass
/// absorbs roundoff.
pub fn solve_affine<R>(residual: &R, x: &mut [f64], free: &[usize]) -> Result<f64>
where
    R: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if free.is_empty() {
        return Ok(0.0);
    }
    let nf = free.len();
    let pick = |r: &[f64]| DVector::from_iterator(nf, free.iter().map(|&i| r[i]));
    let r0 = pick(&residual(x)?);
    let mut a = DMatrix::zeros(nf, nf);
    for (c, &idx) in free.iter().enumerate() {
        let mut xp = x.to_vec();
        xp[idx] += 1.0;
        let rc = pick(&residual(&xp)?);
        a.set_column(c, &(rc - &r0));
    }
    let lu = a.clone().lu();
    let step = lu.solve(&(-&r0)).ok_or_else(|| {
        Error::Degenerate("singular linear system while determining continuity parameters".into())
    })?;
    for (c, &idx) in free.iter().enumerate() {
        x[idx] += step[c];
    }
    // one iterative-refinement pass
    let r1 = pick(&residual(x)?);
    if let Some(corr) = lu.solve(&(-&r1)) {
        for (c, &idx) in free.iter().enumerate() {
            x[idx] += corr[c];
        }
    }
    let rf = pick(&residual(x)?);
    Ok(rf.amax())
}

/// Minimize a quadratic objective over box lower bounds by enumerating the
/// active-bound configurations. `bounds` lists (index, lower bound) for the
/// constrained coordinates; `fixed` coordinates are never varied.
pub fn active_set_qp<F, R>(
    objective: &F,
    residual: &R,
    x0: &[f64],
    fixed: &[usize],
    bounds: &[(usize, f64)],
) -> Result<(Vec<f64>, SolveDiag)>
where
    F: Fn(&[f64]) -> Result<f64>,
    R: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let nvar = x0.len();
    let mut best: Option<(f64, Vec<f64>, Vec<usize>, f64)> = None;
    let nconf = 1usize << bounds.len();
    let mut diag = SolveDiag::default();
    for conf in 0..nconf {
        let active: Vec<usize> =
            (0..bounds.len()).filter(|b| conf & (1 << b) != 0).map(|b| bounds[b].0).collect();
        let mut x = x0.to_vec();
        for (idx, lb) in bounds {
            if active.contains(idx) {
                x[*idx] = *lb;
            }
        }
        let free: Vec<usize> = (0..nvar)
            .filter(|i| !fixed.contains(i) && !active.contains(i))
            .collect();
        let res = match solve_affine(residual, &mut x, &free) {
            Ok(r) => r,
            Err(Error::Degenerate(_)) if nconf > 1 => continue,
            Err(e) => return Err(e),
        };
        // feasibility of the inactive bounded coordinates
        let feasible = bounds
            .iter()
            .all(|(idx, lb)| active.contains(idx) || x[*idx] >= lb - 1e-12);
        if !feasible {
            continue;
        }
        let f = objective(&x)?;
        if !f.is_finite() {
            return Err(Error::Numerical("quadratic subproblem produced a non-finite objective".into()));
        }
        diag.iterations += 1;
        if best.as_ref().is_none_or(|(bf, ..)| f < *bf) {
            best = Some((f, x, active, res));
        }
    }
    let (_, x, active, res) =
        best.ok_or_else(|| Error::Numerical("no feasible active-bound configuration".into()))?;
    diag.active_bounds = active;
    diag.converged = true;
    diag.final_residual = res;
    Ok((x, diag))
}

/// Box-constrained local minimization by projected Newton with a
/// finite-difference Hessian of the supplied gradient surrogate.
///
/// `lower[i]` may be `f64::NEG_INFINITY` for unconstrained coordinates.
/// Converges when the projected gradient-surrogate norm drops below `tol`.
pub fn projected_newton<F, G>(
    objective: &F,
    gradient: &G,
    x0: &[f64],
    lower: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<(Vec<f64>, SolveDiag)>
where
    F: Fn(&[f64]) -> Result<f64>,
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let nvar = x0.len();
    let project = |x: &mut [f64]| {
        for i in 0..nvar {
            if x[i] < lower[i] {
                x[i] = lower[i];
            }
        }
    };
    let mut x = x0.to_vec();
    project(&mut x);
    let mut fx = objective(&x)?;
    let mut diag = SolveDiag::default();
    for it in 0..max_iter {
        diag.iterations = it + 1;
        let g = gradient(&x)?;
        let at_bound: Vec<bool> = (0..nvar).map(|i| x[i] <= lower[i] + 1e-12).collect();
        let pg_norm = (0..nvar)
            .map(|i| if at_bound[i] && g[i] > 0.0 { 0.0 } else { g[i].abs() })
            .fold(0.0, f64::max);
        diag.final_residual = pg_norm;
        if pg_norm <= tol {
            diag.converged = true;
            break;
        }
        let free: Vec<usize> = (0..nvar).filter(|&i| !(at_bound[i] && g[i] > 0.0)).collect();
        let h = fd_hessian(gradient, &x)?;
        let nf = free.len();
        let mut hf = DMatrix::zeros(nf, nf);
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                hf[(a, b)] = h[(i, j)];
            }
        }
        let gf = DVector::from_iterator(nf, free.iter().map(|&i| g[i]));
        let diag_scale = hf.diagonal().amax().max(1e-30);
        let mut tau = 0.0;
        let mut step: Option<DVector<f64>> = None;
        loop {
            let damped = &hf + DMatrix::identity(nf, nf) * tau;
            if let Some(p) = damped.lu().solve(&(-&gf)) {
                if gf.dot(&p) < 0.0 {
                    step = Some(p);
                    break;
                }
            }
            tau = if tau == 0.0 { 1e-10 * diag_scale } else { tau * 10.0 };
            if tau > 1e12 * diag_scale {
                break;
            }
        }
        let p = step.unwrap_or_else(|| -&gf);
        let mut s = 1.0;
        let mut accepted = false;
        while s > 1e-14 {
            let mut xn = x.clone();
            for (a, &i) in free.iter().enumerate() {
                xn[i] += s * p[a];
            }
            project(&mut xn);
            let fn_ = objective(&xn)?;
            if fn_ < fx {
                x = xn;
                fx = fn_;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            // cannot make further progress at floating-point resolution
            break;
        }
    }
    diag.active_bounds = (0..nvar).filter(|&i| x[i] <= lower[i] + 1e-12).collect();
    Ok((x, diag))
}

fn fd_hessian<G>(gradient: &G, x: &[f64]) -> Result<DMatrix<f64>>
where
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    for j in 0..n {
        let step = 1e-6 * x[j].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += step;
        xm[j] -= step;
        let gp = gradient(&xp)?;
        let gm = gradient(&xm)?;
        for i in 0..n {
            h[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
        }
    }
    // symmetrize
    let ht = h.transpose();
    Ok((h + ht) * 0.5)
}
