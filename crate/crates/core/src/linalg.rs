//! Small dense helpers on top of nalgebra.

use alloc::vec::Vec;

use crate::{Error, Matrix, Result};

pub fn frobenius_sq(m: &Matrix) -> f64 {
    m.iter().map(|v| v * v).sum()
}

/// Entrywise ℓ1 norm.
pub fn l1(m: &Matrix) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

pub fn check_square(m: &Matrix, context: &'static str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::dims(context, (m.nrows(), m.nrows()), m.shape()));
    }
    Ok(m.nrows())
}

pub fn check_shape(m: &Matrix, shape: (usize, usize), context: &'static str) -> Result<()> {
    if m.shape() != shape {
        return Err(Error::dims(context, shape, m.shape()));
    }
    Ok(())
}

pub fn check_finite(m: &Matrix, context: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(context))
    }
}

/// Largest `|m_ij - m_ji|` and where it occurs.
pub fn max_asymmetry(m: &Matrix) -> (f64, usize, usize) {
    let n = m.nrows();
    let mut worst = (0.0, 0, 0);
    for j in 0..n {
        for i in (j + 1)..n {
            let gap = (m[(i, j)] - m[(j, i)]).abs();
            if gap > worst.0 || gap.is_nan() {
                worst = (gap, i, j);
            }
        }
    }
    worst
}

/// Symmetric eigendecomposition of the Jordan–Wielandt embedding
/// `[[0, M], [Mᵀ, 0]]`, whose eigenvalues are `±σ_i` (plus `|n - m|` zeros) and
/// whose eigenvector for `+σ_i` is `[u_i; v_i] / sqrt(2)`.
///
/// Used instead of a direct SVD, which loses accuracy on exactly
/// rank-deficient inputs.
pub(crate) fn embedded_eigen(m: &Matrix) -> nalgebra::SymmetricEigen<f64, nalgebra::Dyn> {
    let (n, k) = m.shape();
    let mut big = Matrix::zeros(n + k, n + k);
    big.view_mut((0, n), (n, k)).copy_from(m);
    big.view_mut((n, 0), (k, n)).tr_copy_from(m);
    big.symmetric_eigen()
}

/// Singular values, descending.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    check_finite(m, "singular value decomposition")?;
    let mut v: Vec<f64> = embedded_eigen(m).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v.truncate(m.nrows().min(m.ncols()));
    v.iter_mut().for_each(|s| *s = s.max(0.0));
    Ok(v)
}

pub fn nuclear_norm(m: &Matrix) -> Result<f64> {
    if is_symmetric(m) {
        check_finite(m, "nuclear norm")?;
        return Ok(m.clone().symmetric_eigenvalues().iter().map(|v| v.abs()).sum());
    }
    Ok(singular_values(m)?.iter().sum())
}

/// Exact symmetry up to rounding (`1e-12` relative to the largest entry).
pub fn is_symmetric(m: &Matrix) -> bool {
    m.is_square() && max_asymmetry(m).0 <= 1e-12 * max_abs(m).max(1.0)
}

/// Eigenpairs of a symmetric matrix sorted by ascending eigenvalue.
pub fn sorted_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = symmetrize(m).symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Matrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    symmetrize(m).symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// `log det` of a symmetric positive-definite matrix via Cholesky.
pub fn log_det_pd(m: &Matrix) -> Result<f64> {
    let chol = symmetrize(m).cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l_dirty();
    Ok(2.0 * (0..m.nrows()).map(|i| libm::log(l[(i, i)])).sum::<f64>())
}

pub fn ones(n: usize) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_element(n, 1.0)
}
