//! Graph representations and Laplacian algebra.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::index;

use crate::linalg::{self, ones};
use crate::rng::{self, stream};
use crate::{Error, Matrix, Result};

/// Undirected, possibly weighted graph on `n_nodes` vertices.
///
/// The adjacency is exactly symmetric with zero diagonal and the Laplacian is
/// cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphData {
    adjacency: Matrix,
    laplacian: Matrix,
}

impl GraphData {
    pub fn from_adjacency(adjacency: Matrix) -> Result<Self> {
        let laplacian = laplacian_from_adjacency(&adjacency)?;
        Ok(Self {
            adjacency,
            laplacian,
        })
    }

    /// Builds a graph from `(i, j, weight)` triples. Zero weights are ignored.
    pub fn from_edges<I>(n_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut a = Matrix::zeros(n_nodes, n_nodes);
        for (i, j, w) in edges {
            for node in [i, j] {
                if node >= n_nodes {
                    return Err(Error::NodeOutOfRange { node, n_nodes });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite("edge weight"));
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight {
                    row: i,
                    col: j,
                    value: w,
                });
            }
            if a[(i, j)] != 0.0 {
                return Err(Error::DuplicateEdge(i.min(j), i.max(j)));
            }
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        Self::from_adjacency(a)
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adjacency
    }

    pub fn laplacian(&self) -> &Matrix {
        &self.laplacian
    }

    /// Number of nonzero upper-triangular adjacency entries.
    pub fn n_edges(&self) -> usize {
        self.edge_list().len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[(i, j)] != 0.0
    }

    /// `(i, j, weight)` with `i < j`, in row-major upper-triangular order.
    pub fn edge_list(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n_nodes();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.adjacency[(i, j)];
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn edges(&self) -> EdgeSet {
        EdgeSet {
            edges: self.edge_list().into_iter().map(|(i, j, _)| (i, j)).collect(),
        }
    }

    /// Unordered node pairs that are not edges and satisfy `keep`.
    pub fn non_edges(&self, mut keep: impl FnMut(usize, usize) -> bool) -> EdgeSet {
        let n = self.n_nodes();
        let mut edges = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !self.has_edge(i, j) && keep(i, j) {
                    edges.insert((i, j));
                }
            }
        }
        EdgeSet { edges }
    }

    /// True when every node is reachable from node 0. The empty graph is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.n_nodes();
        if n == 0 {
            return true;
        }
        let mut seen = alloc::vec![false; n];
        let mut stack = alloc::vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !seen[v] && self.adjacency[(u, v)] != 0.0 {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}

/// The `N x F` nodal attribute matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Matrix,
}

impl FeatureMatrix {
    pub fn new(data: Matrix) -> Result<Self> {
        if data.ncols() == 0 {
            return Err(Error::param("features", "at least one feature column is required"));
        }
        linalg::check_finite(&data, "feature matrix")?;
        Ok(Self { data })
    }

    pub fn data(&self) -> &Matrix {
        &self.data
    }

    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.data.ncols()
    }

    pub fn check_rows(&self, n_nodes: usize) -> Result<()> {
        if self.n_rows() != n_nodes {
            return Err(Error::dims("feature rows", (n_nodes, self.n_features()), self.data.shape()));
        }
        Ok(())
    }

    pub fn into_inner(self) -> Matrix {
        self.data
    }
}

/// Set of unordered node pairs stored as `(i, j)` with `i < j`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    edges: BTreeSet<(usize, usize)>,
}

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `{i, j}`; returns `false` if it was already present.
    pub fn insert(&mut self, i: usize, j: usize) -> Result<bool> {
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        Ok(self.edges.insert((i.min(j), i.max(j))))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn max_node(&self) -> Option<usize> {
        self.edges.iter().map(|&(_, j)| j).max()
    }
}

impl FromIterator<(usize, usize)> for EdgeSet {
    /// Collects pairs, normalizing order. Panics on a self-loop.
    fn from_iter<T: IntoIterator<Item = (usize, usize)>>(iter: T) -> Self {
        let mut set = EdgeSet::new();
        for (i, j) in iter {
            set.insert(i, j).expect("edge set cannot hold self-loops");
        }
        set
    }
}

/// `L = diag(A 1) - A`.
pub fn laplacian_from_adjacency(a: &Matrix) -> Result<Matrix> {
    let n = linalg::check_square(a, "adjacency")?;
    linalg::check_finite(a, "adjacency")?;
    for j in 0..n {
        if a[(j, j)] != 0.0 {
            return Err(Error::SelfLoop(j));
        }
        for i in 0..n {
            let v = a[(i, j)];
            if v < 0.0 {
                return Err(Error::NegativeWeight {
                    row: i,
                    col: j,
                    value: v,
                });
            }
            if v != a[(j, i)] {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    gap: (v - a[(j, i)]).abs(),
                });
            }
        }
    }
    let degrees = a * ones(n);
    Ok(Matrix::from_diagonal(&degrees) - a)
}

/// Reads an adjacency back off a (possibly inexact) Laplacian:
/// `A_ij = max(0, -(L_ij + L_ji) / 2)` off the diagonal.
pub fn adjacency_from_laplacian(l: &Matrix, tol: f64) -> Result<Matrix> {
    let n = linalg::check_square(l, "laplacian")?;
    linalg::check_finite(l, "laplacian")?;
    let (gap, row, col) = linalg::max_asymmetry(l);
    if gap > tol {
        return Err(Error::NotSymmetric { row, col, gap });
    }
    Ok(Matrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (-(l[(i, j)] + l[(j, i)]) * 0.5).max(0.0)
        }
    }))
}

/// Laplacian quadratic form `Tr(Xᵀ L X)`.
pub fn smoothness(x: &Matrix, l: &Matrix) -> Result<f64> {
    let n = linalg::check_square(l, "laplacian")?;
    if x.nrows() != n {
        return Err(Error::dims("smoothness features", (n, x.ncols()), x.shape()));
    }
    let lx = l * x;
    Ok(x.component_mul(&lx).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianReport {
    pub max_abs_row_sum: f64,
    /// Largest off-diagonal entry clipped below at zero.
    pub max_positive_offdiag: f64,
    pub max_asymmetry: f64,
    pub min_eigenvalue: f64,
    pub valid: bool,
}

/// Checks the defining properties of a combinatorial Laplacian at `tol`.
pub fn validate_laplacian(l: &Matrix, tol: f64) -> LaplacianReport {
    let n = l.nrows();
    if n != l.ncols() || l.iter().any(|v| !v.is_finite()) {
        return LaplacianReport {
            max_abs_row_sum: f64::INFINITY,
            max_positive_offdiag: f64::INFINITY,
            max_asymmetry: f64::INFINITY,
            min_eigenvalue: f64::NEG_INFINITY,
            valid: false,
        };
    }
    let row_sums = l * ones(n);
    let max_abs_row_sum = row_sums.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut max_positive_offdiag = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                max_positive_offdiag = max_positive_offdiag.max(l[(i, j)]);
            }
        }
    }
    let max_asymmetry = linalg::max_asymmetry(l).0;
    let min_eigenvalue = linalg::min_eigenvalue(l);
    let valid = max_abs_row_sum <= tol
        && max_positive_offdiag <= tol
        && max_asymmetry <= tol
        && min_eigenvalue >= -tol;
    LaplacianReport {
        max_abs_row_sum,
        max_positive_offdiag,
        max_asymmetry,
        min_eigenvalue,
        valid,
    }
}

/// Adds `k` unit-weight edges drawn uniformly from `candidates`.
///
/// Returns the perturbed graph and the injected pairs. Sampling uses the
/// injection substream of `seed`, in the lexicographic order of `candidates`.
pub fn inject_anomalies(
    g: &GraphData,
    candidates: &EdgeSet,
    k: usize,
    seed: u64,
) -> Result<(GraphData, EdgeSet)> {
    let n = g.n_nodes();
    if let Some(node) = candidates.max_node().filter(|&m| m >= n) {
        return Err(Error::NodeOutOfRange { node, n_nodes: n });
    }
    if let Some((i, j)) = candidates.iter().find(|&(i, j)| g.has_edge(i, j)) {
        return Err(Error::param(
            "candidate_pairs",
            alloc::format!("({i}, {j}) is already an edge"),
        ));
    }
    if k > candidates.len() {
        return Err(Error::InsufficientCandidates {
            requested: k,
            available: candidates.len(),
        });
    }
    let pool: Vec<(usize, usize)> = candidates.iter().collect();
    let mut rng = rng::substream(seed, stream::INJECTION);
    let mut picked: Vec<usize> = index::sample(&mut rng, pool.len(), k).into_vec();
    picked.sort_unstable();

    let mut a = g.adjacency().clone();
    let mut truth = EdgeSet::new();
    for idx in picked {
        let (i, j) = pool[idx];
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
        truth.insert(i, j)?;
    }
    Ok((GraphData::from_adjacency(a)?, truth))
}
