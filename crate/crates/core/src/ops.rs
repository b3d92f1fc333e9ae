//! Proximal operators and the Laplacian-set projection shared by both solvers.

use crate::linalg;
use crate::{Error, Matrix, Result};

/// Default stopping tolerance for [`project_laplacian_set`].
pub const PROJECTION_TOL: f64 = 1e-8;
/// Default cycle budget for [`project_laplacian_set`].
pub const PROJECTION_MAX_ITER: usize = 5000;

/// Relative asymmetry accepted by operators that expect a symmetric input.
const SYMMETRY_TOL: f64 = 1e-8;

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::param("tau", "must be nonnegative"));
    }
    Ok(())
}

#[inline]
pub fn shrink(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

/// Entrywise `sign(m) max(|m| - tau, 0)`.
pub fn soft_threshold(m: &Matrix, tau: f64) -> Result<Matrix> {
    check_tau(tau)?;
    Ok(m.map(|v| shrink(v, tau)))
}

/// Singular value soft-thresholding, the prox of `tau ||.||_*`.
pub fn prox_nuclear(m: &Matrix, tau: f64) -> Result<Matrix> {
    check_tau(tau)?;
    linalg::check_finite(m, "nuclear prox input")?;
    if tau == 0.0 {
        return Ok(m.clone());
    }
    if linalg::is_symmetric(m) {
        // singular values of a symmetric matrix are |eigenvalues|
        let eig = linalg::symmetrize(m).symmetric_eigen();
        let shrunk = eig.eigenvalues.map(|v| v.signum() * (v.abs() - tau).max(0.0));
        let q = &eig.eigenvectors;
        return Ok(linalg::symmetrize(&(q * Matrix::from_diagonal(&shrunk) * q.transpose())));
    }
    let (n, k) = m.shape();
    let eig = linalg::embedded_eigen(m);
    let mut out = Matrix::zeros(n, k);
    for (c, &sigma) in eig.eigenvalues.iter().enumerate() {
        if sigma > tau {
            let w = eig.eigenvectors.column(c);
            // u vᵀ = 2 a bᵀ for the eigenvector w = [a; b]
            out.ger(2.0 * (sigma - tau), &w.rows(0, n), &w.rows(n, k), 1.0);
        }
    }
    Ok(out)
}

/// `argmin_{Θ ≻ 0} -log det Θ + (c/2) ||Θ - A||_F²`.
///
/// Closed form through the eigendecomposition `A = Q diag(a) Qᵀ`:
/// `θ_i = (a_i + sqrt(a_i² + 4/c)) / 2`.
pub fn prox_neg_logdet_quad(a: &Matrix, c: f64) -> Result<Matrix> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::param("c", "must be positive and finite"));
    }
    linalg::check_square(a, "log-det prox input")?;
    linalg::check_finite(a, "log-det prox input")?;
    let (gap, row, col) = linalg::max_asymmetry(a);
    if gap > SYMMETRY_TOL * linalg::max_abs(a).max(1.0) {
        return Err(Error::NotSymmetric { row, col, gap });
    }
    let eig = linalg::symmetrize(a).symmetric_eigen();
    let theta = eig.eigenvalues.map(|ai| {
        let disc = libm::sqrt(ai * ai + 4.0 / c);
        // Cancellation-free root for large negative eigenvalues.
        if ai >= 0.0 {
            0.5 * (ai + disc)
        } else {
            (2.0 / c) / (disc - ai)
        }
    });
    let q = &eig.eigenvectors;
    let out = q * Matrix::from_diagonal(&theta) * q.transpose();
    Ok(linalg::symmetrize(&out))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionReport {
    /// Dykstra cycles performed.
    pub iterations: usize,
    /// Frobenius norm of the last cycle's change.
    pub final_change: f64,
    pub feasible: bool,
}

/// Projection onto `{Z sym : Z 1 = 0, Tr Z >= m}`, in place.
///
/// The zero-row-sum set is an affine subspace, so its projection is exact and
/// the trace floor is then enforced along the in-subspace normal `I - J/N`.
fn project_zero_rows_trace(z: &mut Matrix, trace_floor: f64, shift: &mut [f64]) {
    let n = z.nrows();
    let nf = n as f64;
    shift.fill(0.0);
    let data = z.as_mut_slice();
    for col in data.chunks_exact(n) {
        for (a, v) in shift.iter_mut().zip(col) {
            *a += v;
        }
    }
    let s = shift.iter().sum::<f64>() / (2.0 * nf);
    for a in shift.iter_mut() {
        *a = (*a - s) / nf;
    }
    let mut tr = 0.0;
    for (j, col) in data.chunks_exact_mut(n).enumerate() {
        let sj = shift[j];
        for (v, a) in col.iter_mut().zip(shift.iter()) {
            *v -= a + sj;
        }
        tr += col[j];
    }
    if n > 1 && tr < trace_floor {
        let t = (trace_floor - tr) / (nf - 1.0);
        let off = t / nf;
        for (j, col) in data.chunks_exact_mut(n).enumerate() {
            for v in col.iter_mut() {
                *v -= off;
            }
            col[j] += t;
        }
    }
}

fn max_offdiag(z: &Matrix) -> f64 {
    let n = z.nrows();
    let mut worst = f64::NEG_INFINITY;
    for (j, col) in z.as_slice().chunks_exact(n).enumerate() {
        for (i, v) in col.iter().enumerate() {
            if i != j {
                worst = worst.max(*v);
            }
        }
    }
    worst
}

/// Euclidean projection of `sym(M)` onto the Laplacian set
/// `{Z 1 = 0} ∩ {Z_ij <= 0, i != j} ∩ {Tr Z >= m}` by Dykstra's algorithm.
///
/// Members of the set are diagonally dominant with nonnegative diagonal, so
/// they are positive semidefinite and no separate PSD projection is needed.
/// Stops once the Dykstra increment and the largest positive off-diagonal
/// both fall to `tol`; row sums and the trace floor hold exactly at every
/// iterate. If `max_iter` runs out the last iterate is returned with
/// `feasible = false`. A positive floor is unreachable for `N = 1`.
pub fn project_laplacian_set(
    m: &Matrix,
    trace_floor: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(Matrix, ProjectionReport)> {
    let n = linalg::check_square(m, "projection input")?;
    linalg::check_finite(m, "projection input")?;
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    if max_iter == 0 {
        return Err(Error::param("max_iter", "must be positive"));
    }
    if n < 2 && trace_floor > 0.0 {
        return Err(Error::param("trace_floor", "the only 1-node Laplacian is zero"));
    }

    // x: iterate (output of the affine step), y: output of the clamp step,
    // p, q: Dykstra corrections of the clamp and affine steps.
    let mut x = linalg::symmetrize(m);
    let mut y = Matrix::zeros(n, n);
    let mut w = Matrix::zeros(n, n);
    let mut p = Matrix::zeros(n, n);
    let mut q = Matrix::zeros(n, n);
    let mut shift = alloc::vec![0.0; n];
    let mut report = ProjectionReport {
        iterations: 0,
        final_change: f64::INFINITY,
        feasible: false,
    };
    for it in 1..=max_iter {
        for j in 0..n {
            let range = j * n..(j + 1) * n;
            let (xc, pc, yc) = (&x.as_slice()[range.clone()], &mut p.as_mut_slice()[range.clone()], &mut y.as_mut_slice()[range]);
            for ((yk, pk), xk) in yc.iter_mut().zip(pc.iter_mut()).zip(xc) {
                let v = xk + *pk;
                let c = v.min(0.0);
                *yk = c;
                *pk = v - c;
            }
            // the diagonal is unconstrained
            yc[j] += pc[j];
            pc[j] = 0.0;
        }
        w.copy_from(&y);
        w += &q;
        project_zero_rows_trace(&mut w, trace_floor, &mut shift);
        let mut change = 0.0;
        for (((qk, yk), wk), xk) in q.iter_mut().zip(y.iter()).zip(w.iter()).zip(x.iter()) {
            *qk += yk - wk;
            let d = wk - xk;
            change += d * d;
        }
        core::mem::swap(&mut x, &mut w);
        let change = libm::sqrt(change);
        report.iterations = it;
        report.final_change = change;
        if change <= tol && max_offdiag(&x) <= tol {
            report.feasible = true;
            break;
        }
    }
    Ok((x, report))
}
