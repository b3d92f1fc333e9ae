//! Joint anomaly identification and nominal-Laplacian recovery.
//!
//! Minimizes over a Laplacian `R`, anomalies `S` and a precision matrix `Θ ≻ 0`
//!
//! ```text
//! ||L̃ - S - R||_F² + λ||S||_1 + μ||R||_*
//!   + α (Tr(X Xᵀ Θ) - log det Θ + β||Θ||_1) + κ||R - Θ||_F²
//! s.t. Tr(R) >= m,  R 1 = 0,  R_ij <= 0 (i != j)
//! ```
//!
//! by ADMM with consensus copies `Z₁ = R` (nuclear prox), `Z₂ = R` (Laplacian
//! set projection) and `W = Θ` (ℓ1 prox). Every subproblem is closed form or
//! an exact projection. The standalone graphical lasso, used as a topology
//! baseline, is the same machinery without the Laplacian coupling.

use alloc::vec::Vec;

use crate::linalg;
use crate::ops::{
    project_laplacian_set, prox_neg_logdet_quad, prox_nuclear, soft_threshold, PROJECTION_MAX_ITER,
    PROJECTION_TOL,
};
use crate::{Error, Matrix, Result};

/// How the trace floor `m` is chosen for a given perturbed Laplacian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceFloor {
    Absolute(f64),
    /// `m = Tr(L̃) - 2k`: unit-weight edges each carry 2 of trace, so this
    /// budgets the removal of `k` edges.
    AnomalyBudget(usize),
    /// `m = fraction * Tr(L̃)`.
    Fraction(f64),
}

impl Default for TraceFloor {
    fn default() -> Self {
        TraceFloor::AnomalyBudget(10)
    }
}

impl TraceFloor {
    /// Fallback when no anomaly budget is configured.
    pub const FALLBACK: TraceFloor = TraceFloor::Fraction(0.8);

    pub fn resolve(&self, l_pert: &Matrix) -> f64 {
        let tr = l_pert.trace();
        let m = match *self {
            TraceFloor::Absolute(m) => m,
            TraceFloor::AnomalyBudget(k) => tr - 2.0 * k as f64,
            TraceFloor::Fraction(f) => f * tr,
        };
        m.max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryParams {
    pub lambda: f64,
    pub mu: f64,
    /// Weight α of the Gaussian likelihood term.
    pub alpha: f64,
    /// ℓ1 weight β on `Θ`.
    pub beta: f64,
    /// Coupling κ between `R` and `Θ`.
    pub kappa: f64,
    pub trace_floor: TraceFloor,
    /// ADMM penalty ρ (fixed).
    pub rho: f64,
    pub max_iters: usize,
    pub res_tol: f64,
    pub projection_tol: f64,
    pub projection_max_iter: usize,
}

impl Default for RecoveryParams {
    fn default() -> Self {
        Self {
            lambda: 0.03,
            mu: 0.1,
            alpha: 1.0,
            beta: 0.01,
            kappa: 1.0,
            trace_floor: TraceFloor::default(),
            rho: 1.0,
            max_iters: 2000,
            res_tol: 1e-5,
            projection_tol: PROJECTION_TOL,
            projection_max_iter: PROJECTION_MAX_ITER,
        }
    }
}

impl RecoveryParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("kappa", self.kappa),
            ("rho", self.rho),
            ("res_tol", self.res_tol),
            ("projection_tol", self.projection_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, "must be finite and positive"));
            }
        }
        match self.trace_floor {
            TraceFloor::Absolute(m) if !(m >= 0.0) || !m.is_finite() => {
                return Err(Error::param("trace_floor", "must be finite and nonnegative"))
            }
            TraceFloor::Fraction(f) if !(0.0..=1.0).contains(&f) => {
                return Err(Error::param("trace_floor", "fraction must lie in [0, 1]"))
            }
            _ => {}
        }
        if self.max_iters == 0 || self.projection_max_iter == 0 {
            return Err(Error::param("max_iters", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    /// Recovered Laplacian, projected onto the Laplacian set at exit.
    pub r: Matrix,
    /// The last ADMM iterate of `R` before the exit projection.
    pub r_raw: Matrix,
    pub s: Matrix,
    pub theta: Matrix,
    /// Trace floor actually used.
    pub trace_floor: f64,
    /// Relative primal residual per iteration.
    pub primal_residuals: Vec<f64>,
    /// Relative dual residual per iteration.
    pub dual_residuals: Vec<f64>,
    /// Objective at `(R, S, Θ)`: the initial point, then one entry per iteration.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl RecoveryResult {
    /// `L̃ - R - S`, the part of the input neither term explains.
    pub fn residual(&self, l_pert: &Matrix) -> Matrix {
        l_pert - &self.r - &self.s
    }
}

fn check_problem(l_pert: &Matrix, x: &Matrix) -> Result<usize> {
    let n = linalg::check_square(l_pert, "perturbed laplacian")?;
    if x.nrows() != n {
        return Err(Error::dims("feature rows", (n, x.ncols()), x.shape()));
    }
    linalg::check_finite(l_pert, "perturbed laplacian")?;
    linalg::check_finite(x, "features")?;
    Ok(n)
}

/// Evaluates the recovery objective. Fails when `Θ` is not positive definite.
pub fn objective(
    l_pert: &Matrix,
    r: &Matrix,
    s: &Matrix,
    theta: &Matrix,
    x: &Matrix,
    params: &RecoveryParams,
) -> Result<f64> {
    let n = check_problem(l_pert, x)?;
    for (m, ctx) in [(r, "R"), (s, "S"), (theta, "Theta")] {
        linalg::check_shape(m, (n, n), ctx)?;
    }
    let log_det = linalg::log_det_pd(theta)?;
    let fit = linalg::frobenius_sq(&(l_pert - s - r));
    // Tr(X Xᵀ Θ) = Tr(Xᵀ Θ X)
    let trace_term = x.component_mul(&(theta * x)).sum();
    let likelihood = trace_term - log_det + params.beta * linalg::l1(theta);
    Ok(fit
        + params.lambda * linalg::l1(s)
        + params.mu * linalg::nuclear_norm(r)?
        + params.alpha * likelihood
        + params.kappa * linalg::frobenius_sq(&(r - theta)))
}

fn stacked_norm(parts: &[&Matrix]) -> f64 {
    libm::sqrt(parts.iter().map(|m| linalg::frobenius_sq(m)).sum())
}

/// Solves the Laplacian recovery problem by ADMM.
///
/// One outer iteration updates, in order: `S` (soft threshold), `R`
/// (quadratic, closed form), `Z₁` (nuclear prox), `Z₂` (Laplacian projection),
/// `Θ` (log-det prox with the linear trace term folded into the centre), `W`
/// (ℓ1 prox) and the three scaled duals. Iteration stops when both relative
/// residuals fall below `res_tol`.
pub fn solve_recovery(l_pert: &Matrix, x: &Matrix, params: &RecoveryParams) -> Result<RecoveryResult> {
    let n = check_problem(l_pert, x)?;
    params.validate()?;
    let (lsym_gap, row, col) = linalg::max_asymmetry(l_pert);
    if lsym_gap > 1e-9 * linalg::max_abs(l_pert).max(1.0) {
        return Err(Error::NotSymmetric {
            row,
            col,
            gap: lsym_gap,
        });
    }
    let m = params.trace_floor.resolve(l_pert);
    let project = |z: &Matrix| -> Result<Matrix> {
        Ok(project_laplacian_set(z, m, params.projection_tol, params.projection_max_iter)?.0)
    };

    let covariance = x * x.transpose();
    let rho = params.rho;
    let (alpha, kappa) = (params.alpha, params.kappa);

    let mut r = project(l_pert)?;
    let mut s = Matrix::zeros(n, n);
    let mut theta = Matrix::identity(n, n);
    let mut z1 = r.clone();
    let mut z2 = r.clone();
    let mut w = theta.clone();
    let mut u1 = Matrix::zeros(n, n);
    let mut u2 = Matrix::zeros(n, n);
    let mut u3 = Matrix::zeros(n, n);

    let mut objective_history = alloc::vec![objective(l_pert, &r, &s, &theta, x, params)?];
    let mut primal_residuals = Vec::new();
    let mut dual_residuals = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    let diverged = |iteration: usize| Error::Diverged {
        solver: "recovery",
        iteration,
    };

    while iterations < params.max_iters {
        iterations += 1;
        s = soft_threshold(&(l_pert - &r), 0.5 * params.lambda)?;
        r = ((l_pert - &s) * 2.0 + &theta * (2.0 * kappa) + (&z1 - &u1) * rho + (&z2 - &u2) * rho)
            / (2.0 + 2.0 * kappa + 2.0 * rho);
        if r.iter().any(|v| !v.is_finite()) {
            return Err(diverged(iterations));
        }

        let z1_prev = core::mem::replace(&mut z1, prox_nuclear(&(&r + &u1), params.mu / rho)?);
        let z2_prev = core::mem::replace(&mut z2, project(&(&r + &u2))?);

        let c = (2.0 * kappa + rho) / alpha;
        let centre = (&r * (2.0 * kappa) + (&w - &u3) * rho - &covariance * alpha) / (2.0 * kappa + rho);
        theta = prox_neg_logdet_quad(&linalg::symmetrize(&centre), c).map_err(|e| match e {
            Error::NonFinite(_) => diverged(iterations),
            other => other,
        })?;
        let w_prev = core::mem::replace(&mut w, soft_threshold(&(&theta + &u3), alpha * params.beta / rho)?);

        let g1 = &r - &z1;
        let g2 = &r - &z2;
        let g3 = &theta - &w;
        u1 += &g1;
        u2 += &g2;
        u3 += &g3;

        let primal = stacked_norm(&[&g1, &g2, &g3]);
        let dual = rho * stacked_norm(&[&(&z1 - &z1_prev), &(&z2 - &z2_prev), &(&w - &w_prev)]);
        let x_norm = stacked_norm(&[&r, &r, &theta]);
        let z_norm = stacked_norm(&[&z1, &z2, &w]);
        let scale = x_norm.max(z_norm).max(1.0);
        let primal_rel = primal / scale;
        let dual_rel = dual / scale;
        if !primal_rel.is_finite() || !dual_rel.is_finite() {
            return Err(diverged(iterations));
        }
        primal_residuals.push(primal_rel);
        dual_residuals.push(dual_rel);
        objective_history.push(objective(l_pert, &r, &s, &theta, x, params)?);

        if primal_rel < params.res_tol && dual_rel < params.res_tol {
            converged = true;
            break;
        }
    }

    let r_out = project(&r)?;
    Ok(RecoveryResult {
        r: r_out,
        r_raw: r,
        s,
        theta,
        trace_floor: m,
        primal_residuals,
        dual_residuals,
        objective_history,
        iterations,
        converged,
    })
}

#[derive(Debug, Clone)]
pub struct GlassoResult {
    /// Positive-definite precision estimate.
    pub theta: Matrix,
    /// Soft-thresholded consensus copy; exactly sparse, not necessarily PD.
    pub sparse: Matrix,
    pub iterations: usize,
    pub converged: bool,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

/// Graphical lasso `min_{Θ ≻ 0} Tr(X Xᵀ Θ) - log det Θ + β||Θ||_1` by ADMM.
pub fn solve_graphical_lasso(
    x: &Matrix,
    beta: f64,
    rho: f64,
    max_iters: usize,
    res_tol: f64,
) -> Result<GlassoResult> {
    for (name, v) in [("beta", beta), ("rho", rho), ("res_tol", res_tol)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::param(name, "must be finite and positive"));
        }
    }
    if max_iters == 0 {
        return Err(Error::param("max_iters", "must be positive"));
    }
    linalg::check_finite(x, "features")?;
    let n = x.nrows();
    let covariance = x * x.transpose();
    let mut theta = Matrix::identity(n, n);
    let mut z = theta.clone();
    let mut u = Matrix::zeros(n, n);
    let mut result = GlassoResult {
        theta: theta.clone(),
        sparse: z.clone(),
        iterations: 0,
        converged: false,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
    };
    for it in 1..=max_iters {
        theta = prox_neg_logdet_quad(&(&z - &u - &covariance / rho), rho)?;
        let z_prev = core::mem::replace(&mut z, soft_threshold(&(&theta + &u), beta / rho)?);
        let gap = &theta - &z;
        u += &gap;
        let scale = libm::sqrt(linalg::frobenius_sq(&theta).max(linalg::frobenius_sq(&z))).max(1.0);
        let primal = libm::sqrt(linalg::frobenius_sq(&gap)) / scale;
        let dual = rho * libm::sqrt(linalg::frobenius_sq(&(&z - &z_prev))) / scale;
        result.iterations = it;
        result.primal_residual = primal;
        result.dual_residual = dual;
        if primal < res_tol && dual < res_tol {
            result.converged = true;
            break;
        }
    }
    result.theta = theta;
    result.sparse = z;
    Ok(result)
}
