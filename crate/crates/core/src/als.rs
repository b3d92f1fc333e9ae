//! Alternating least squares for the factorized low-rank + sparse objective
//!
//! ```text
//! f(U, V, S) = ||L̃ - S - U Vᵀ||_F² + λ ||S||_1 + μ (||U||_F² + ||V||_F²)
//!              + γ Tr(Xᵀ U Vᵀ X)
//! ```
//!
//! Each block has a closed-form minimizer. Setting `∇_U f = 0` gives
//! `U (VᵀV + μI) = (L̃ - S) V - (γ/2) X Xᵀ V`, symmetrically for `V`, and the
//! `S` block is an entrywise soft-threshold at `λ/2`. With `γ = 0` this is the
//! plain low-rank + sparse decomposition without feature smoothness.

use alloc::vec::Vec;

use nalgebra::Cholesky;
use rand_distr::{Distribution, Normal};

use crate::linalg;
use crate::ops::soft_threshold;
use crate::rng::{self, stream};
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AlsParams {
    /// Sparsity weight λ.
    pub lambda: f64,
    /// Factor regularization μ.
    pub mu: f64,
    /// Smoothness weight γ; zero gives the baseline decomposition.
    pub gamma: f64,
    /// Number of columns of `U` and `V`.
    pub rank_bound: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub seed: u64,
}

impl AlsParams {
    pub const DEFAULT_MAX_ITERS: usize = 500;
    pub const DEFAULT_REL_TOL: f64 = 1e-6;
    pub const DEFAULT_LAMBDA: f64 = 0.05;
    pub const DEFAULT_MU: f64 = 10.0;
    pub const DEFAULT_GAMMA: f64 = 20.0;
    pub const BASELINE_LAMBDA: f64 = 1.0;
    pub const BASELINE_MU: f64 = 3.0;

    pub fn new(lambda: f64, mu: f64, gamma: f64, rank_bound: usize) -> Self {
        Self {
            lambda,
            mu,
            gamma,
            rank_bound,
            max_iters: Self::DEFAULT_MAX_ITERS,
            rel_tol: Self::DEFAULT_REL_TOL,
            seed: 0,
        }
    }

    /// Default weights for the smoothness-regularized detector.
    pub fn smooth(rank_bound: usize) -> Self {
        Self::new(Self::DEFAULT_LAMBDA, Self::DEFAULT_MU, Self::DEFAULT_GAMMA, rank_bound)
    }

    /// Default weights for the decomposition without smoothness (`γ = 0`).
    pub fn baseline(rank_bound: usize) -> Self {
        Self::new(Self::BASELINE_LAMBDA, Self::BASELINE_MU, 0.0, rank_bound)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Number of communities when known, else `ceil(sqrt(N))`.
    pub fn default_rank(n_nodes: usize, communities: Option<usize>) -> usize {
        communities.unwrap_or_else(|| libm::ceil(libm::sqrt(n_nodes as f64)) as usize).max(1)
    }

    pub fn validate(&self, n_nodes: usize) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::param("lambda", "must be finite and nonnegative"));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::param("mu", "must be finite and positive"));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::param("gamma", "must be finite and nonnegative"));
        }
        if self.rank_bound == 0 || self.rank_bound > n_nodes {
            return Err(Error::param("rank_bound", alloc::format!("must lie in 1..={n_nodes}")));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::param("rel_tol", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AlsResult {
    pub s: Matrix,
    pub u: Matrix,
    pub v: Matrix,
    /// Objective at the initial point followed by one entry per iteration.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl AlsResult {
    pub fn low_rank(&self) -> Matrix {
        &self.u * self.v.transpose()
    }
}

fn check_problem(l_pert: &Matrix, x: &Matrix) -> Result<usize> {
    let n = linalg::check_square(l_pert, "perturbed laplacian")?;
    if x.nrows() != n {
        return Err(Error::dims("feature rows", (n, x.ncols()), x.shape()));
    }
    Ok(n)
}

/// `γ Tr(Xᵀ U Vᵀ X)` without forming any `N x N` product.
fn smoothness_term(u: &Matrix, v: &Matrix, x: &Matrix, gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let xu = x.transpose() * u;
    let xv = x.transpose() * v;
    gamma * xu.component_mul(&xv).sum()
}

/// Evaluates `f(U, V, S)`.
pub fn objective(
    l_pert: &Matrix,
    s: &Matrix,
    u: &Matrix,
    v: &Matrix,
    x: &Matrix,
    params: &AlsParams,
) -> Result<f64> {
    let n = check_problem(l_pert, x)?;
    linalg::check_shape(s, (n, n), "sparse part")?;
    linalg::check_shape(u, (n, u.ncols()), "U factor")?;
    linalg::check_shape(v, (n, u.ncols()), "V factor")?;
    let uvt = u * v.transpose();
    Ok(objective_with_product(l_pert, s, u, v, &uvt, x, params))
}

fn objective_with_product(
    l_pert: &Matrix,
    s: &Matrix,
    u: &Matrix,
    v: &Matrix,
    uvt: &Matrix,
    x: &Matrix,
    params: &AlsParams,
) -> f64 {
    let mut fit = 0.0;
    for ((l, s), r) in l_pert.iter().zip(s.iter()).zip(uvt.iter()) {
        let e = l - s - r;
        fit += e * e;
    }
    fit + params.lambda * linalg::l1(s)
        + params.mu * (linalg::frobenius_sq(u) + linalg::frobenius_sq(v))
        + smoothness_term(u, v, x, params.gamma)
}

/// Right-solves `B (FᵀF + μI)^{-1}` for `F` with `r` columns.
fn ridge_solve(b: Matrix, f: &Matrix, mu: f64) -> Result<Matrix> {
    let r = f.ncols();
    let gram = f.transpose() * f + Matrix::identity(r, r) * mu;
    let chol = Cholesky::new(gram).ok_or(Error::NotPositiveDefinite)?;
    Ok(chol.solve(&b.transpose()).transpose())
}

fn factor_update(mt_f: Matrix, f: &Matrix, x: &Matrix, mu: f64, gamma: f64) -> Result<Matrix> {
    if !(mu > 0.0) {
        return Err(Error::param("mu", "must be positive"));
    }
    let mut b = mt_f;
    if gamma != 0.0 {
        let xxf = x * (x.transpose() * f);
        b -= xxf * (0.5 * gamma);
    }
    linalg::check_finite(&b, "factor update")?;
    ridge_solve(b, f, mu)
}

/// `U* = (M V - (γ/2) X Xᵀ V)(VᵀV + μI)^{-1}` with `M = L̃ - S`.
pub fn update_u(m: &Matrix, v: &Matrix, x: &Matrix, mu: f64, gamma: f64) -> Result<Matrix> {
    let n = check_problem(m, x)?;
    linalg::check_shape(v, (n, v.ncols()), "V factor")?;
    factor_update(m * v, v, x, mu, gamma)
}

/// `V* = (Mᵀ U - (γ/2) X Xᵀ U)(UᵀU + μI)^{-1}` with `M = L̃ - S`.
pub fn update_v(m: &Matrix, u: &Matrix, x: &Matrix, mu: f64, gamma: f64) -> Result<Matrix> {
    let n = check_problem(m, x)?;
    linalg::check_shape(u, (n, u.ncols()), "U factor")?;
    factor_update(m.tr_mul(u), u, x, mu, gamma)
}

/// `S* = soft_threshold(L̃ - U Vᵀ, λ/2)`.
pub fn update_s(l_pert: &Matrix, u: &Matrix, v: &Matrix, lambda: f64) -> Result<Matrix> {
    let n = linalg::check_square(l_pert, "perturbed laplacian")?;
    linalg::check_shape(u, (n, u.ncols()), "U factor")?;
    linalg::check_shape(v, (n, u.ncols()), "V factor")?;
    soft_threshold(&(l_pert - u * v.transpose()), 0.5 * lambda)
}

/// Iterative state of the block coordinate descent.
///
/// [`solve_als`] drives it to convergence; callers that need per-iteration
/// control (timing, tracing) can call [`AlsSolver::step`] directly.
#[derive(Debug, Clone)]
pub struct AlsSolver<'a> {
    l_pert: &'a Matrix,
    x: &'a Matrix,
    params: AlsParams,
    u: Matrix,
    v: Matrix,
    s: Matrix,
    history: Vec<f64>,
    iterations: usize,
}

impl<'a> AlsSolver<'a> {
    /// Seeded initialization: `U`, `V` i.i.d. Gaussian with standard deviation
    /// `sqrt(||L̃||_F / (N R))`, `S = 0`.
    pub fn new(l_pert: &'a Matrix, x: &'a Matrix, params: AlsParams) -> Result<Self> {
        let n = check_problem(l_pert, x)?;
        params.validate(n)?;
        let r = params.rank_bound;
        let sd = libm::sqrt(libm::sqrt(linalg::frobenius_sq(l_pert)) / (n * r) as f64);
        let normal = Normal::new(0.0, sd).map_err(|_| Error::NonFinite("initial scale"))?;
        let mut rng = rng::substream(params.seed, stream::SOLVER_INIT);
        let u = Matrix::from_fn(n, r, |_, _| normal.sample(&mut rng));
        let v = Matrix::from_fn(n, r, |_, _| normal.sample(&mut rng));
        Self::with_init(l_pert, x, params, u, v, Matrix::zeros(n, n))
    }

    pub fn with_init(
        l_pert: &'a Matrix,
        x: &'a Matrix,
        params: AlsParams,
        u: Matrix,
        v: Matrix,
        s: Matrix,
    ) -> Result<Self> {
        let n = check_problem(l_pert, x)?;
        params.validate(n)?;
        linalg::check_finite(l_pert, "perturbed laplacian")?;
        linalg::check_finite(x, "features")?;
        let r = params.rank_bound;
        linalg::check_shape(&u, (n, r), "initial U")?;
        linalg::check_shape(&v, (n, r), "initial V")?;
        linalg::check_shape(&s, (n, n), "initial S")?;
        let f0 = objective(l_pert, &s, &u, &v, x, &params)?;
        Ok(Self {
            l_pert,
            x,
            params,
            u,
            v,
            s,
            history: alloc::vec![f0],
            iterations: 0,
        })
    }

    /// One sweep of the U, V and S updates. Returns the new objective.
    pub fn step(&mut self) -> Result<f64> {
        let p = &self.params;
        let m = self.l_pert - &self.s;
        self.u = update_u(&m, &self.v, self.x, p.mu, p.gamma)
            .map_err(|e| self.divergence(e))?;
        self.v = update_v(&m, &self.u, self.x, p.mu, p.gamma)
            .map_err(|e| self.divergence(e))?;
        let uvt = &self.u * self.v.transpose();
        self.s = soft_threshold(&(self.l_pert - &uvt), 0.5 * p.lambda)?;
        let f = objective_with_product(self.l_pert, &self.s, &self.u, &self.v, &uvt, self.x, p);
        self.iterations += 1;
        if !f.is_finite() {
            return Err(Error::Diverged {
                solver: "als",
                iteration: self.iterations,
            });
        }
        self.history.push(f);
        Ok(f)
    }

    fn divergence(&self, e: Error) -> Error {
        match e {
            Error::NonFinite(_) | Error::NotPositiveDefinite => Error::Diverged {
                solver: "als",
                iteration: self.iterations + 1,
            },
            other => other,
        }
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn s(&self) -> &Matrix {
        &self.s
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    /// Iterates until the relative objective change drops below `rel_tol` or
    /// the iteration budget is spent.
    pub fn run(mut self) -> Result<AlsResult> {
        let mut converged = false;
        while self.iterations < self.params.max_iters {
            let prev = *self.history.last().expect("history starts non-empty");
            let f = self.step()?;
            let scale = prev.abs().max(f64::MIN_POSITIVE);
            if (prev - f).abs() <= self.params.rel_tol * scale {
                converged = true;
                break;
            }
        }
        Ok(AlsResult {
            s: self.s,
            u: self.u,
            v: self.v,
            objective_history: self.history,
            iterations: self.iterations,
            converged,
        })
    }
}

/// Runs the alternating least squares solver from its seeded initialization.
pub fn solve_als(l_pert: &Matrix, x: &Matrix, params: &AlsParams) -> Result<AlsResult> {
    AlsSolver::new(l_pert, x, params.clone())?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    fn random(n: usize, m: usize, seed: u64, scale: f64) -> Matrix {
        let mut rng = rng::substream(seed, 77);
        Matrix::from_fn(n, m, |_, _| rng.random_range(-scale..scale))
    }

    fn instance(seed: u64) -> (Matrix, Matrix, Matrix, AlsParams) {
        let l = linalg::symmetrize(&random(8, 8, seed, 2.0));
        let x = random(8, 3, seed + 1, 1.0);
        let s = random(8, 8, seed + 2, 0.5);
        let p = AlsParams::new(0.3, 0.7, 0.9, 2);
        (l, x, s, p)
    }

    #[test]
    fn objective_examples() {
        let z = Matrix::zeros(4, 4);
        let uv = Matrix::zeros(4, 2);
        let x = random(4, 2, 1, 1.0);
        let p = AlsParams::new(0.5, 1.0, 2.0, 2);
        assert_eq!(objective(&z, &z, &uv, &uv, &x, &p).unwrap(), 0.0);

        let l = linalg::symmetrize(&random(4, 4, 3, 1.0));
        let f = objective(&l, &l, &uv, &uv, &x, &p).unwrap();
        assert!((f - 0.5 * linalg::l1(&l)).abs() < 1e-14);

        assert!(objective(&l, &l, &uv, &uv, &random(5, 2, 1, 1.0), &p).is_err());
    }

    #[test]
    fn objective_matches_term_by_term() {
        let (l, x, s, p) = instance(4);
        let u = random(8, 2, 10, 1.0);
        let v = random(8, 2, 11, 1.0);
        let mut fit = 0.0;
        let mut l1 = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                let mut r = 0.0;
                for k in 0..2 {
                    r += u[(i, k)] * v[(j, k)];
                }
                fit += (l[(i, j)] - s[(i, j)] - r).powi(2);
                l1 += s[(i, j)].abs();
            }
        }
        let ridge: f64 = u.iter().chain(v.iter()).map(|a| a * a).sum();
        let r = &u * v.transpose();
        let smooth = (x.transpose() * r * &x).trace();
        let expected = fit + p.lambda * l1 + p.mu * ridge + p.gamma * smooth;
        let got = objective(&l, &s, &u, &v, &x, &p).unwrap();
        assert!((got - expected).abs() <= 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn zero_cases_of_factor_updates() {
        let x = random(6, 2, 1, 1.0);
        let v = random(6, 2, 2, 1.0);
        let u = update_u(&Matrix::zeros(6, 6), &v, &x, 1.0, 0.0).unwrap();
        assert_eq!(u, Matrix::zeros(6, 2));
        let m = random(6, 6, 3, 1.0);
        let u = update_u(&m, &Matrix::zeros(6, 2), &x, 1.0, 2.0).unwrap();
        assert_eq!(u, Matrix::zeros(6, 2));
        let v2 = update_v(&Matrix::zeros(6, 6), &v, &x, 1.0, 0.0).unwrap();
        assert_eq!(v2, Matrix::zeros(6, 2));
        let v3 = update_v(&m, &Matrix::zeros(6, 2), &x, 1.0, 2.0).unwrap();
        assert_eq!(v3, Matrix::zeros(6, 2));
    }

    #[test]
    fn update_s_examples() {
        let u = Matrix::from_row_slice(2, 1, &[1.0, 2.0]);
        let v = Matrix::from_row_slice(2, 1, &[0.5, -1.0]);
        let l = &u * v.transpose();
        assert_eq!(update_s(&l, &u, &v, 1.0).unwrap(), Matrix::zeros(2, 2));

        let z = Matrix::zeros(1, 1);
        let l = Matrix::from_element(1, 1, 3.0);
        let s = update_s(&l, &z, &z, 2.0).unwrap();
        // (3 - s)² + 2|s| on a grid
        let best = (0..=4000)
            .map(|k| k as f64 * 1e-3)
            .min_by(|a, b| {
                let f = |s: f64| (3.0 - s).powi(2) + 2.0 * s.abs();
                f(*a).total_cmp(&f(*b))
            })
            .unwrap();
        assert!((s[(0, 0)] - best).abs() < 1e-9);
        assert_eq!(s[(0, 0)], 2.0);

        let l = random(4, 4, 5, 1.0);
        let z = Matrix::zeros(4, 1);
        assert_eq!(update_s(&l, &z, &z, 2.0 * 1.0 + 1e-9).unwrap(), Matrix::zeros(4, 4));
    }

    #[test]
    fn lambda_zero_leaves_no_residual() {
        let (l, x, _, mut p) = instance(9);
        p.lambda = 0.0;
        let mut solver = AlsSolver::new(&l, &x, p.clone()).unwrap();
        solver.step().unwrap();
        let resid = &l - solver.s() - solver.u() * solver.v().transpose();
        assert!(linalg::max_abs(&resid) < 1e-12);
        let f = solver.history()[1];
        let ridge = p.mu * (linalg::frobenius_sq(solver.u()) + linalg::frobenius_sq(solver.v()));
        let smooth = p.gamma * (x.transpose() * solver.u() * solver.v().transpose() * &x).trace();
        assert!((f - ridge - smooth).abs() < 1e-9);
    }

    #[test]
    fn monotone_descent_and_determinism() {
        let (l, x, _, p) = instance(12);
        let p = AlsParams { max_iters: 80, rel_tol: 1e-14, ..p };
        let a = solve_als(&l, &x, &p).unwrap();
        for w in a.objective_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * w[0].abs());
        }
        let b = solve_als(&l, &x, &p).unwrap();
        assert_eq!(a.objective_history, b.objective_history);
        assert_eq!(a.s, b.s);
    }

    #[test]
    fn gamma_zero_drops_smoothness() {
        let (l, x, s, mut p) = instance(3);
        p.gamma = 0.0;
        let u = random(8, 2, 1, 1.0);
        let v = random(8, 2, 2, 1.0);
        let with_x = objective(&l, &s, &u, &v, &x, &p).unwrap();
        let without = objective(&l, &s, &u, &v, &Matrix::zeros(8, 3), &p).unwrap();
        assert_eq!(with_x, without);
    }

    #[test]
    fn rejects_bad_params() {
        let (l, x, _, p) = instance(1);
        assert!(solve_als(&l, &x, &AlsParams { rank_bound: 9, ..p.clone() }).is_err());
        assert!(solve_als(&l, &x, &AlsParams { mu: 0.0, ..p.clone() }).is_err());
        assert!(solve_als(&l, &x, &AlsParams { lambda: -1.0, ..p.clone() }).is_err());
        assert!(solve_als(&l, &random(7, 3, 1, 1.0), &p).is_err());
    }

    #[test]
    fn default_rank_rules() {
        assert_eq!(AlsParams::default_rank(80, Some(4)), 4);
        assert_eq!(AlsParams::default_rank(80, None), 9);
        assert_eq!(AlsParams::default_rank(16, None), 4);
    }
}
