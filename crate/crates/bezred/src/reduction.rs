//! The reduction engine.
//!
//! Phase A determines the continuity parameters (by the parametric identity
//! jet, a linear system, an active-set QP, or a projected Newton iteration,
//! depending on mode and orders). Phase B builds the boundary control points,
//! the correction coefficients, and the inner control points through the
//! constrained dual projection, then assembles the reduced curve and its
//! error metrics.

use crate::bernstein::{binomial_row, forward_diff, inner_i, BezierCurve, JacobiWeight, Point};
use crate::continuity::{
    end_boundary, end_partials, f_form, inner_partials, start_boundary, start_partials,
    ContinuitySpec, Fixing, GParams,
};
use crate::dual::{constrained_gram, inner_range, phi_table, PhiTable};
use crate::error::{Error, Result};
use crate::solver::{active_set_qp, projected_newton, solve_affine, SolveDiag};
use std::time::Instant;

/// Default degree cap; matches the precision analysis of the incremental
/// combinatorial products. Override with
/// [`ReductionProblem::allow_high_degree`].
pub const MAX_SOURCE_DEGREE: usize = 20;

/// Default sampling grid for the maximum-error metric.
pub const DEFAULT_GRID: usize = 500;

/// Continuity handling for the reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Parametric C^(k,l) continuity (identity reparametrization jet).
    C,
    /// Hybrid: leading parameters pinned where k or l >= 2, the rest from a
    /// linear system.
    Cg,
    /// Full G^(k,l): all parameters optimized under positivity bounds.
    G,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::C => "c",
            Mode::Cg => "cg",
            Mode::G => "g",
        }
    }
}

/// A fully validated reduction instance.
#[derive(Debug, Clone)]
pub struct ReductionProblem {
    pub source: BezierCurve,
    pub target_degree: usize,
    pub spec: ContinuitySpec,
    pub weight: JacobiWeight,
    pub grid: usize,
    pub allow_high_degree: bool,
}

impl ReductionProblem {
    pub fn new(
        source: BezierCurve,
        target_degree: usize,
        spec: ContinuitySpec,
        weight: JacobiWeight,
    ) -> Result<Self> {
        let p = ReductionProblem {
            source,
            target_degree,
            spec,
            weight,
            grid: DEFAULT_GRID,
            allow_high_degree: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_grid(mut self, grid: usize) -> Result<Self> {
        if grid < 1 {
            return Err(Error::domain("grid size must be at least 1"));
        }
        self.grid = grid;
        Ok(self)
    }

    pub fn allow_high_degree(mut self) -> Self {
        self.allow_high_degree = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.source.degree();
        let m = self.target_degree;
        if !(n > m && m > 0) {
            return Err(Error::domain(format!("violated assumption n > m > 0 (n={n}, m={m})")));
        }
        if n > MAX_SOURCE_DEGREE && !self.allow_high_degree {
            return Err(Error::domain(format!(
                "source degree n={n} exceeds the default cap {MAX_SOURCE_DEGREE}; \
                 enable the high-degree override to proceed"
            )));
        }
        self.spec.validate(m)?;
        Ok(())
    }

    fn n_lambda(&self) -> usize {
        self.spec.k.max(0) as usize
    }

    fn n_mu(&self) -> usize {
        self.spec.l.max(0) as usize
    }
}

/// Per-run solver and conditioning bookkeeping.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub solver_iterations: usize,
    /// Names of the bound constraints active in the returned parameters.
    pub active_bounds: Vec<String>,
    pub gram_condition: f64,
    pub solver_converged: bool,
    pub solver_residual: f64,
    pub warnings: Vec<String>,
    pub phase_a_seconds: f64,
    pub phase_b_seconds: f64,
    pub metrics_seconds: f64,
}

/// Result of a reduction run.
#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub reduced: BezierCurve,
    pub params: GParams,
    pub e2: f64,
    pub einf: f64,
    pub diagnostics: Diagnostics,
}

/// Correction coefficients: upsilon_j = p_j - C(n,j)^-1 * sum over the fixed
/// boundary indices h of C(n-m, j-h) C(m,h) r_h.
///
/// `start` holds r_0..r_k (empty for k = -1), `end` holds r_(m-l)..r_m.
pub fn upsilon(p: &BezierCurve, m: usize, start: &[Point], end: &[Point]) -> Vec<Point> {
    let n = p.degree();
    let d = p.dimension();
    let cn = binomial_row(n);
    let cm = binomial_row(m);
    let cnm = binomial_row(n - m);
    let fixed: Vec<(usize, &Point)> = start
        .iter()
        .enumerate()
        .chain(end.iter().enumerate().map(|(off, r)| (m + 1 - end.len() + off, r)))
        .collect();
    p.points()
        .iter()
        .enumerate()
        .map(|(j, pj)| {
            let inv = 1.0 / cn[j];
            let mut v = pj.clone();
            for (hidx, r) in &fixed {
                if *hidx > j || j - *hidx > n - m {
                    continue;
                }
                let c = cnm[j - *hidx] * cm[*hidx];
                for hh in 0..d {
                    v[hh] -= c * inv * r[hh];
                }
            }
            v
        })
        .collect()
}

/// Inner control points r_i = sum_j upsilon_j phi_ij, i = k+1..=m-l-1.
pub fn inner_points(upsilons: &[Point], phi: &PhiTable) -> Vec<Point> {
    let d = upsilons[0].len();
    inner_range(phi.m, phi.k, phi.l)
        .map(|i| {
            let mut r = vec![0.0; d];
            for (j, u) in upsilons.iter().enumerate() {
                let f = phi.get(i, j);
                for h in 0..d {
                    r[h] += f * u[h];
                }
            }
            r
        })
        .collect()
}

/// Weighted squared L2 distance between two curves.
///
/// Evaluated as the quadratic form of the coefficient difference after
/// elevating to a common degree; this is algebraically the three-term
/// I_nn + I_mm - 2 I_nm expansion but does not cancel when the curves nearly
/// coincide. Tiny negative roundoff is clamped to zero.
pub fn squared_error(p: &BezierCurve, r: &BezierCurve, w: JacobiWeight) -> Result<f64> {
    if p.dimension() != r.dimension() {
        return Err(Error::domain(format!(
            "dimension mismatch: {} vs {}",
            p.dimension(),
            r.dimension()
        )));
    }
    let deg = p.degree().max(r.degree());
    let pe = p.elevate(deg)?;
    let re = r.elevate(deg)?;
    let mut total = 0.0;
    for h in 0..p.dimension() {
        let diff: Vec<f64> =
            pe.coordinate(h).iter().zip(re.coordinate(h)).map(|(a, b)| a - b).collect();
        total += inner_i(&diff, &diff, w);
    }
    if total < 0.0 {
        if total < -1e-12 {
            return Err(Error::Numerical(format!("squared error {total} below roundoff floor")));
        }
        total = 0.0;
    }
    Ok(total)
}

/// Maximum Euclidean deviation over the uniform grid {0, 1/n_grid, ..., 1}.
pub fn max_error(p: &BezierCurve, r: &BezierCurve, n_grid: usize) -> f64 {
    let d = p.dimension();
    (0..=n_grid)
        .map(|g| {
            let t = g as f64 / n_grid as f64;
            let a = p.eval(t);
            let b = r.eval(t);
            (0..d).map(|h| (a[h] - b[h]).powi(2)).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max)
}

/// Phase B for fixed parameters: boundary points, correction coefficients,
/// inner points, assembled curve.
pub fn phase_b(
    p: &BezierCurve,
    m: usize,
    k: i32,
    l: i32,
    params: &GParams,
    phi: &PhiTable,
) -> Result<BezierCurve> {
    let start = start_boundary(p, m, k, &params.lambdas)?;
    let end = end_boundary(p, m, l, &params.mus)?;
    let ups = upsilon(p, m, &start, &end);
    let inner = inner_points(&ups, phi);
    let mut pts = start;
    pts.extend(inner);
    pts.extend(end);
    debug_assert_eq!(pts.len(), m + 1);
    BezierCurve::new(pts)
}

/// The squared error as a function of the continuity parameters.
pub fn objective(problem: &ReductionProblem, phi: &PhiTable, params: &GParams) -> Result<f64> {
    let r = phase_b(
        &problem.source,
        problem.target_degree,
        problem.spec.k,
        problem.spec.l,
        params,
        phi,
    )?;
    squared_error(&problem.source, &r, problem.weight)
}

/// Left-hand sides of the stationarity system, ordered
/// [lambda_1..lambda_k, mu_1..mu_l]. The vector is proportional to the
/// gradient of [`objective`] with positive factor
/// 2 B(alpha+1,beta+1) / (alpha+beta+2)_m.
pub fn gradient_residuals(
    problem: &ReductionProblem,
    phi: &PhiTable,
    params: &GParams,
) -> Result<Vec<f64>> {
    let p = &problem.source;
    let m = problem.target_degree;
    let (k, l) = (problem.spec.k, problem.spec.l);
    let w = problem.weight;
    let r_curve = phase_b(p, m, k, l, params, phi)?;
    let d = p.dimension();

    // F_mj(r^h) - F_nj(p^h) for all j, per coordinate
    let mut gdiff = vec![vec![0.0; m + 1]; d];
    for (h, row) in gdiff.iter_mut().enumerate() {
        let rh = r_curve.coordinate(h);
        let ph = p.coordinate(h);
        for (j, g) in row.iter_mut().enumerate() {
            *g = f_form(&rh, j, m, w) - f_form(&ph, j, m, w);
        }
    }

    let mut out = Vec::with_capacity(problem.n_lambda() + problem.n_mu());
    for u in 1..=problem.n_lambda() {
        let bp = start_partials(p, m, k, &params.lambdas, u)?;
        let blist: Vec<(usize, Point)> =
            (u..=k as usize).map(|g| (g, bp[g].clone())).collect();
        let ip = inner_partials(phi, &blist);
        let mut res = 0.0;
        for (h, row) in gdiff.iter().enumerate() {
            for (j, bpj) in bp.iter().enumerate() {
                res += row[j] * bpj[h];
            }
            for (off, j) in inner_range(m, k, l).enumerate() {
                res += row[j] * ip[off][h];
            }
        }
        out.push(res);
    }
    for v in 1..=problem.n_mu() {
        let bp = end_partials(p, m, l, &params.mus, v)?;
        let base = m - l as usize;
        let blist: Vec<(usize, Point)> =
            bp.iter().enumerate().map(|(off, dv)| (base + off, dv.clone())).collect();
        let ip = inner_partials(phi, &blist);
        let mut res = 0.0;
        for (h, row) in gdiff.iter().enumerate() {
            for (off, bpo) in bp.iter().enumerate() {
                res += row[base + off] * bpo[h];
            }
            for (off, j) in inner_range(m, k, l).enumerate() {
                res += row[j] * ip[off][h];
            }
        }
        out.push(res);
    }
    Ok(out)
}

fn residual_closure<'a>(
    problem: &'a ReductionProblem,
    phi: &'a PhiTable,
) -> impl Fn(&[f64]) -> Result<Vec<f64>> + 'a {
    move |x: &[f64]| {
        gradient_residuals(problem, phi, &GParams::from_vec(x, problem.spec.k, problem.spec.l))
    }
}

fn objective_closure<'a>(
    problem: &'a ReductionProblem,
    phi: &'a PhiTable,
) -> impl Fn(&[f64]) -> Result<f64> + 'a {
    move |x: &[f64]| {
        objective(problem, phi, &GParams::from_vec(x, problem.spec.k, problem.spec.l))
    }
}

/// Indices of the leading (bounded) parameters inside the flat vector.
fn bound_indices(problem: &ReductionProblem) -> Vec<(usize, f64)> {
    let mut v = Vec::new();
    if problem.spec.k >= 1 {
        v.push((0, problem.spec.d0));
    }
    if problem.spec.l >= 1 {
        v.push((problem.n_lambda(), problem.spec.d1));
    }
    v
}

fn bound_name(problem: &ReductionProblem, idx: usize) -> String {
    if idx == 0 && problem.spec.k >= 1 {
        "lambda1".into()
    } else {
        "mu1".into()
    }
}

/// Hybrid determination: pin lambda_1 (k >= 2) and/or mu_1 (l >= 2) to 1 and
/// solve the remaining stationarity equations, which are then linear. For
/// k = 1 (or l = 1) a nonpositive solved leading parameter triggers the
/// bounded quadratic fallback.
pub fn solve_linear_cg(
    problem: &ReductionProblem,
    phi: &PhiTable,
) -> Result<(GParams, SolveDiag)> {
    let (k, l) = (problem.spec.k, problem.spec.l);
    let nk = problem.n_lambda();
    let nvar = nk + problem.n_mu();
    let mut fixed = Vec::new();
    if k >= 2 {
        fixed.push(0);
    }
    if l >= 2 {
        fixed.push(nk);
    }
    let mut x = GParams::identity(k, l).to_vec();
    let free: Vec<usize> = (0..nvar).filter(|i| !fixed.contains(i)).collect();
    let residual = residual_closure(problem, phi);
    let res = solve_affine(&residual, &mut x, &free)?;
    let bad_lambda = k == 1 && x[0] <= 0.0;
    let bad_mu = l == 1 && x[nk] <= 0.0;
    if bad_lambda || bad_mu {
        let objective = objective_closure(problem, phi);
        let bounds: Vec<(usize, f64)> = bound_indices(problem)
            .into_iter()
            .filter(|(i, _)| !fixed.contains(i))
            .collect();
        let x0 = GParams::identity(k, l).to_vec();
        let (x, mut diag) = active_set_qp(&objective, &residual, &x0, &fixed, &bounds)?;
        diag.warnings.push(
            "linear system produced a nonpositive leading parameter; \
             solved the bounded quadratic program instead"
                .into(),
        );
        return Ok((GParams::from_vec(&x, k, l), diag));
    }
    let diag = SolveDiag {
        iterations: 1,
        active_bounds: vec![],
        converged: true,
        final_residual: res,
        warnings: vec![],
    };
    Ok((GParams::from_vec(&x, k, l), diag))
}

/// Bounded quadratic determination by active-set enumeration. Valid when the
/// objective is quadratic in the free parameters (k, l <= 1, or hybrid-fixed
/// leading parameters).
pub fn solve_qp(
    problem: &ReductionProblem,
    phi: &PhiTable,
    initial: &GParams,
) -> Result<(GParams, SolveDiag)> {
    let (k, l) = (problem.spec.k, problem.spec.l);
    let nk = problem.n_lambda();
    let mut fixed = Vec::new();
    if problem.spec.p == Fixing::FixedOne {
        fixed.push(0);
    }
    if problem.spec.q == Fixing::FixedOne {
        fixed.push(nk);
    }
    let bounds: Vec<(usize, f64)> =
        bound_indices(problem).into_iter().filter(|(i, _)| !fixed.contains(i)).collect();
    let residual = residual_closure(problem, phi);
    let objective = objective_closure(problem, phi);
    let mut x0 = initial.to_vec();
    for &i in &fixed {
        x0[i] = 1.0;
    }
    let (x, diag) = active_set_qp(&objective, &residual, &x0, &fixed, &bounds)?;
    Ok((GParams::from_vec(&x, k, l), diag))
}

/// Box-constrained local minimization of the (quartic or sextic) objective
/// from `initial`, with a multistart fallback when the first run makes no
/// progress.
pub fn solve_nlp(
    problem: &ReductionProblem,
    phi: &PhiTable,
    initial: &GParams,
) -> Result<(GParams, SolveDiag)> {
    let (k, l) = (problem.spec.k, problem.spec.l);
    let nvar = problem.n_lambda() + problem.n_mu();
    let mut lower = vec![f64::NEG_INFINITY; nvar];
    for (i, lb) in bound_indices(problem) {
        lower[i] = lb;
    }
    let residual = residual_closure(problem, phi);
    let objective = objective_closure(problem, phi);
    let x0 = initial.to_vec();
    let f0 = objective(&x0)?;
    let (mut x, mut diag) = projected_newton(&objective, &residual, &x0, &lower, 100, 1e-10)?;
    let mut fx = objective(&x)?;
    if fx >= f0 && diag.iterations > 1 {
        // retry from perturbed leading parameters, keep the best iterate
        for (sa, sb) in [(0.5, 0.5), (0.5, 1.5), (1.5, 0.5), (1.5, 1.5)] {
            let mut xs = x0.clone();
            if problem.spec.k >= 1 {
                xs[0] *= sa;
            }
            if problem.spec.l >= 1 {
                xs[problem.n_lambda()] *= sb;
            }
            let (xr, dr) = projected_newton(&objective, &residual, &xs, &lower, 100, 1e-10)?;
            let fr = objective(&xr)?;
            if fr < fx {
                x = xr;
                fx = fr;
                diag = dr;
            }
        }
    }
    if !diag.converged {
        diag.warnings.push(format!(
            "nonlinear iteration stopped without reaching the residual target \
             (final residual {:.3e})",
            diag.final_residual
        ));
    }
    Ok((GParams::from_vec(&x, k, l), diag))
}

/// Normal-equations route for the inner control points with fixed boundary:
/// solves the Gram system G r = <W, B_i^m> directly. Used as an independent
/// cross-check of [`inner_points`].
pub fn oracle_normal_equations(
    p: &BezierCurve,
    m: usize,
    k: i32,
    l: i32,
    w: JacobiWeight,
    start: &[Point],
    end: &[Point],
) -> Result<Vec<Point>> {
    let n = p.degree();
    let d = p.dimension();
    let gram = constrained_gram(m, k, l, w)?;
    let chol = nalgebra::Cholesky::new(gram.entries.clone()).ok_or_else(|| {
        Error::IllConditioned { cond: f64::INFINITY, context: "normal-equations Gram solve".into() }
    })?;
    let ups = upsilon(p, m, start, end);
    let lo = (k + 1) as usize;
    let size = (m as i32 - k - l - 1) as usize;
    let mut out = vec![vec![0.0; d]; size];
    for h in 0..d {
        let mut rhs = nalgebra::DVector::zeros(size);
        for s in 0..size {
            let mut acc = 0.0;
            for (j, u) in ups.iter().enumerate() {
                acc += u[h] * crate::bernstein::bernstein_pair_inner(n, j, m, lo + s, w)?;
            }
            rhs[s] = acc;
        }
        let sol = chol.solve(&rhs);
        for s in 0..size {
            out[s][h] = sol[s];
        }
    }
    Ok(out)
}

/// Full two-phase reduction.
pub fn reduce(problem: &ReductionProblem, mode: Mode) -> Result<ReductionResult> {
    problem.validate()?;
    let p = &problem.source;
    let m = problem.target_degree;
    let (k, l) = (problem.spec.k, problem.spec.l);
    let mut diagnostics = Diagnostics::default();

    if k >= 1 {
        let dp0 = forward_diff(p.points(), 1, 0)?;
        if dp0.iter().all(|&x| x == 0.0) {
            diagnostics.warnings.push(
                "degenerate start tangent (Delta p_0 = 0): lambda_1 is unidentifiable".into(),
            );
        }
    }
    if l >= 1 {
        let dpn = forward_diff(p.points(), 1, p.degree() - 1)?;
        if dpn.iter().all(|&x| x == 0.0) {
            diagnostics.warnings.push(
                "degenerate end tangent (Delta p_(n-1) = 0): mu_1 is unidentifiable".into(),
            );
        }
    }

    let t_a = Instant::now();
    let phi = phi_table(p.degree(), m, k, l, problem.weight)?;
    diagnostics.gram_condition = phi.gram_condition;

    let params = if k < 1 && l < 1 {
        // no continuity parameters to determine
        diagnostics.solver_converged = true;
        GParams::identity(k, l)
    } else {
        match mode {
            Mode::C => {
                diagnostics.solver_converged = true;
                GParams::identity(k, l)
            }
            Mode::Cg => {
                let (params, diag) = solve_linear_cg(problem, &phi)?;
                absorb(&mut diagnostics, problem, diag);
                params
            }
            Mode::G => {
                let initial = GParams::identity(k, l);
                if k > 1 || l > 1 {
                    let (mut params, diag) = solve_nlp(problem, &phi, &initial)?;
                    absorb(&mut diagnostics, problem, diag);
                    // the hybrid solution is cheap; use it as a second start
                    // so the full-G result never trails it
                    if let Ok((cg, _)) = solve_linear_cg(problem, &phi) {
                        let f_g = objective(problem, &phi, &params)?;
                        let f_cg = objective(problem, &phi, &cg)?;
                        if f_cg < f_g {
                            let (better, diag2) = solve_nlp(problem, &phi, &cg)?;
                            absorb(&mut diagnostics, problem, diag2);
                            if objective(problem, &phi, &better)? < f_g {
                                params = better;
                            }
                        }
                    }
                    params
                } else {
                    let (params, diag) = solve_qp(problem, &phi, &initial)?;
                    absorb(&mut diagnostics, problem, diag);
                    params
                }
            }
        }
    };
    diagnostics.phase_a_seconds = t_a.elapsed().as_secs_f64();

    let t_b = Instant::now();
    let reduced = phase_b(p, m, k, l, &params, &phi)?;
    diagnostics.phase_b_seconds = t_b.elapsed().as_secs_f64();

    let t_m = Instant::now();
    let e2 = squared_error(p, &reduced, problem.weight)?.sqrt();
    let einf = max_error(p, &reduced, problem.grid);
    diagnostics.metrics_seconds = t_m.elapsed().as_secs_f64();

    Ok(ReductionResult { reduced, params, e2, einf, diagnostics })
}

fn absorb(diag: &mut Diagnostics, problem: &ReductionProblem, s: SolveDiag) {
    diag.solver_iterations += s.iterations;
    diag.solver_converged = s.converged;
    diag.solver_residual = s.final_residual;
    diag.active_bounds = s.active_bounds.iter().map(|&i| bound_name(problem, i)).collect();
    diag.warnings.extend(s.warnings);
}
