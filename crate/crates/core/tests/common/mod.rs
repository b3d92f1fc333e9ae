//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use anomedge_core::graph::laplacian_from_adjacency;
use anomedge_core::linalg;
use anomedge_core::ops::{project_laplacian_set, PROJECTION_MAX_ITER};
use anomedge_core::recovery::{objective, RecoveryParams};
use anomedge_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x7e57)
}

pub fn uniform(n: usize, m: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(n, m, |_, _| rng.random_range(lo..hi))
}

pub fn fro(m: &Matrix) -> f64 {
    linalg::frobenius_sq(m).sqrt()
}

/// Weighted random graph Laplacian; each pair is an edge with probability `p`.
pub fn random_laplacian(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Matrix {
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                let w = rng.random_range(0.2..1.5);
                a[(i, j)] = w;
                a[(j, i)] = w;
            }
        }
    }
    laplacian_from_adjacency(&a).unwrap()
}

/// Central-difference gradient of `f` at `x`.
pub fn fd_gradient(f: impl Fn(&Matrix) -> f64, x: &Matrix, h: f64) -> Matrix {
    let mut g = Matrix::zeros(x.nrows(), x.ncols());
    let mut probe = x.clone();
    for k in 0..x.len() {
        let orig = probe[k];
        probe[k] = orig + h;
        let up = f(&probe);
        probe[k] = orig - h;
        let down = f(&probe);
        probe[k] = orig;
        g[k] = (up - down) / (2.0 * h);
    }
    g
}

/// Nuclear norm from the eigenvalues of `MᵀM`; eigenvalues at rounding level
/// (relative `1e-13`) are treated as exact zeros.
pub fn nuclear_norm_ref(m: &Matrix) -> f64 {
    let eig = (m.transpose() * m).symmetric_eigenvalues();
    let top = eig.iter().fold(0.0f64, |a, &v| a.max(v));
    eig.iter().filter(|&&v| v > 1e-13 * top).map(|v| v.sqrt()).sum()
}

/// Brute-force Frobenius distance from `m` (symmetrized) to the 3x3 Laplacian
/// set with trace floor: grid over the three edge weights, then pattern search.
pub fn projection_distance_3x3(m: &Matrix, floor: f64) -> f64 {
    let ms = (m + m.transpose()) * 0.5;
    let lap = |w: [f64; 3]| {
        Matrix::from_row_slice(3, 3, &[
            w[0] + w[1], -w[0], -w[1],
            -w[0], w[0] + w[2], -w[2],
            -w[1], -w[2], w[1] + w[2],
        ])
    };
    let dist = |w: [f64; 3]| {
        if w.iter().any(|&v| v < 0.0) || 2.0 * (w[0] + w[1] + w[2]) < floor {
            f64::INFINITY
        } else {
            fro(&(lap(w) - &ms))
        }
    };
    let hi = 2.0 * linalg::max_abs(&ms) + floor + 1.0;
    let steps = 50;
    let mut best = ([0.0; 3], f64::INFINITY);
    for a in 0..=steps {
        for b in 0..=steps {
            for c in 0..=steps {
                let w = [a, b, c].map(|k| k as f64 * hi / steps as f64);
                let d = dist(w);
                if d < best.1 {
                    best = (w, d);
                }
            }
        }
    }
    let mut h = hi / steps as f64;
    while h > 1e-10 {
        let mut improved = false;
        for k in 0..3 {
            for other in 0..3 {
                for dir in [-1.0, 1.0] {
                    let mut w = best.0;
                    w[k] += dir * h;
                    if other != k {
                        w[other] -= dir * h;
                    }
                    let d = dist(w);
                    if d < best.1 {
                        best = (w, d);
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    best.1
}

/// Brute-force distance to the 2x2 Laplacian set `{[[a,-a],[-a,a]] : 2a >= floor, a >= 0}`.
pub fn projection_distance_2x2(m: &Matrix, floor: f64) -> f64 {
    let ms = (m + m.transpose()) * 0.5;
    let f = |a: f64| fro(&(Matrix::from_row_slice(2, 2, &[a, -a, -a, a]) - &ms));
    let lo = (floor / 2.0).max(0.0);
    let hi = lo + 2.0 * linalg::max_abs(&ms) + 1.0;
    // golden-section search on a convex function of one variable
    let (mut a, mut b) = (lo, hi);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if f(c) <= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(lo).min(f(0.5 * (a + b)))
}

/// Reference minimizer of the recovery objective by projected subgradient
/// descent over `(R, Θ)` with `S` eliminated in closed form. Returns the best
/// objective value seen.
pub fn recovery_reference(l: &Matrix, x: &Matrix, params: &RecoveryParams, iters: usize) -> f64 {
    let n = l.nrows();
    let m = params.trace_floor.resolve(l);
    let proj = |z: &Matrix| project_laplacian_set(z, m, 1e-12, PROJECTION_MAX_ITER).unwrap().0;
    let soft = |v: f64, t: f64| v.signum() * (v.abs() - t).max(0.0);
    let s_of = |r: &Matrix| (l - r).map(|v| soft(v, params.lambda / 2.0));
    let f = |r: &Matrix, th: &Matrix| objective(l, r, &s_of(r), th, x, params).unwrap_or(f64::INFINITY);
    let cov = x * x.transpose();
    let sign = |m: &Matrix| m.map(|v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 });

    let mut r = proj(l);
    let mut th = Matrix::identity(n, n);
    let mut best = f(&r, &th);
    for k in 0..iters {
        let s = s_of(&r);
        let svd = r.clone().svd(true, true);
        let nuc_sub = svd.u.unwrap() * svd.v_t.unwrap();
        let g_r = (&r + &s - l) * 2.0 + nuc_sub * params.mu + (&r - &th) * (2.0 * params.kappa);
        let th_inv = th.clone().try_inverse().unwrap();
        let g_th = (&cov - &th_inv + sign(&th) * params.beta) * params.alpha - (&r - &th) * (2.0 * params.kappa);
        let norm = (linalg::frobenius_sq(&g_r) + linalg::frobenius_sq(&g_th)).sqrt().max(1e-12);
        let mut step = 0.5 / ((k + 1) as f64).sqrt() / norm;
        loop {
            let th_new = &th - &g_th * step;
            let th_new = (&th_new + th_new.transpose()) * 0.5;
            if th_new.clone().cholesky().is_some() {
                r = proj(&(&r - &g_r * step));
                th = th_new;
                break;
            }
            step *= 0.5;
        }
        let v = f(&r, &th);
        best = best.min(v);
    }
    best
}

/// Mean of the hypergeometric distribution: draws `n` from a population of
/// `total` with `successes` marked.
pub fn hypergeometric_mean(total: usize, successes: usize, draws: usize) -> f64 {
    draws as f64 * successes as f64 / total as f64
}

/// Variance of the same hypergeometric distribution.
pub fn hypergeometric_variance(total: usize, successes: usize, draws: usize) -> f64 {
    let (nn, k, n) = (total as f64, successes as f64, draws as f64);
    n * (k / nn) * (1.0 - k / nn) * (nn - n) / (nn - 1.0)
}
