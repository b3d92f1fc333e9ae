//! Synthetic stochastic block models with spectral node features, and the
//! anomaly-injection scenarios used for evaluation.

use alloc::vec::Vec;

use rand::Rng as _;

use crate::graph::{inject_anomalies, EdgeSet, FeatureMatrix, GraphData};
use crate::linalg;
use crate::rng::{self, stream};
use crate::{Error, Matrix, Result};

/// Connectivity resampling budget for [`generate_sbm`].
pub const MAX_SBM_ATTEMPTS: usize = 100;

/// Stochastic block model configuration. `SBM(C, F)` has `C` communities and
/// `F` spectral features per node.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmConfig {
    pub n_communities: usize,
    pub n_nodes: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub n_features: usize,
    pub seed: u64,
}

impl SbmConfig {
    pub const DEFAULT_N_NODES: usize = 80;
    pub const DEFAULT_P_IN: f64 = 0.6;
    pub const DEFAULT_P_OUT: f64 = 0.05;

    /// `SBM(C, F)` with the default size and edge probabilities.
    pub fn new(n_communities: usize, n_features: usize) -> Self {
        Self {
            n_communities,
            n_nodes: Self::DEFAULT_N_NODES,
            p_in: Self::DEFAULT_P_IN,
            p_out: Self::DEFAULT_P_OUT,
            n_features,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(name, "must be a probability"));
            }
        }
        if self.p_out > self.p_in {
            return Err(Error::param("p_out", "must not exceed p_in"));
        }
        if self.n_communities == 0 || self.n_communities > self.n_nodes {
            return Err(Error::param("n_communities", "must lie in 1..=n_nodes"));
        }
        if self.n_features == 0 || self.n_features > self.n_nodes {
            return Err(Error::param("n_features", "must lie in 1..=n_nodes"));
        }
        Ok(())
    }

    /// Community of each node: contiguous blocks whose sizes differ by at
    /// most one, the first `N mod C` blocks taking the extra node.
    pub fn labels(&self) -> Vec<usize> {
        let (n, c) = (self.n_nodes, self.n_communities);
        let base = n / c;
        let extra = n % c;
        let mut labels = Vec::with_capacity(n);
        for community in 0..c {
            let size = base + usize::from(community < extra);
            labels.extend(core::iter::repeat_n(community, size));
        }
        labels
    }
}

/// A perturbed attributed graph together with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graph: GraphData,
    pub clean_graph: GraphData,
    pub features: FeatureMatrix,
    pub truth: EdgeSet,
    pub labels: Option<Vec<usize>>,
}

/// Samples an SBM, redrawing on a fresh substream until it is connected.
pub fn generate_sbm(cfg: &SbmConfig) -> Result<(GraphData, Vec<usize>)> {
    cfg.validate()?;
    let labels = cfg.labels();
    let n = cfg.n_nodes;
    for attempt in 0..MAX_SBM_ATTEMPTS {
        let mut rng = rng::substream(cfg.seed, stream::GRAPH + attempt as u64);
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let p = if labels[i] == labels[j] { cfg.p_in } else { cfg.p_out };
                if rng.random::<f64>() < p {
                    a[(i, j)] = 1.0;
                    a[(j, i)] = 1.0;
                }
            }
        }
        let g = GraphData::from_adjacency(a)?;
        if g.is_connected() {
            return Ok((g, labels));
        }
    }
    Err(Error::Disconnected {
        attempts: MAX_SBM_ATTEMPTS,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFeatures {
    pub features: FeatureMatrix,
    /// The `F` smallest Laplacian eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Set when the second-smallest eigenvalue is below `1e-10`.
    pub disconnected: bool,
}

/// Unit-norm Laplacian eigenvectors for the `F` smallest eigenvalues.
///
/// Each column is signed so that its largest-magnitude entry is positive
/// (first such entry on ties).
pub fn spectral_features(l: &Matrix, n_features: usize) -> Result<SpectralFeatures> {
    let n = linalg::check_square(l, "laplacian")?;
    linalg::check_finite(l, "laplacian")?;
    if n_features == 0 || n_features > n {
        return Err(Error::param("n_features", alloc::format!("must lie in 1..={n}")));
    }
    let (values, vectors) = linalg::sorted_eigen(l);
    let mut x = vectors.columns(0, n_features).into_owned();
    for mut col in x.column_iter_mut() {
        let mut pivot = 0;
        for i in 1..n {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
    }
    let disconnected = n > 1 && values[1] < 1e-10;
    Ok(SpectralFeatures {
        features: FeatureMatrix::new(x)?,
        eigenvalues: values[..n_features].to_vec(),
        disconnected,
    })
}

/// SBM with spectral features of the clean graph and `k` anomalous edges
/// injected among inter-community non-edges (injection substream of `seed`).
pub fn build_sbm_scenario(cfg: &SbmConfig, k: usize, seed: u64) -> Result<Scenario> {
    let (clean, labels) = generate_sbm(cfg)?;
    let features = spectral_features(clean.laplacian(), cfg.n_features)?.features;
    let candidates = clean.non_edges(|i, j| labels[i] != labels[j]);
    let (graph, truth) = inject_anomalies(&clean, &candidates, k, seed)?;
    Ok(Scenario {
        graph,
        clean_graph: clean,
        features,
        truth,
        labels: Some(labels),
    })
}

/// Injects `k` anomalous edges uniformly among all non-edges of a given
/// attributed graph.
pub fn build_attributed_scenario(
    g: &GraphData,
    features: &FeatureMatrix,
    k: usize,
    seed: u64,
) -> Result<Scenario> {
    features.check_rows(g.n_nodes())?;
    let candidates = g.non_edges(|_, _| true);
    let (graph, truth) = inject_anomalies(g, &candidates, k, seed)?;
    Ok(Scenario {
        graph,
        clean_graph: g.clone(),
        features: features.clone(),
        truth,
        labels: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::smoothness;

    #[test]
    fn labels_are_near_equal_blocks() {
        let cfg = SbmConfig { n_nodes: 10, ..SbmConfig::new(3, 2) };
        assert_eq!(cfg.labels(), std::vec![0, 0, 0, 0, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn disjoint_cliques_never_connect() {
        let cfg = SbmConfig {
            n_nodes: 4,
            p_in: 1.0,
            p_out: 0.0,
            ..SbmConfig::new(2, 1)
        };
        assert_eq!(generate_sbm(&cfg), Err(Error::Disconnected { attempts: 100 }));
    }

    #[test]
    fn full_probabilities_give_complete_graph() {
        let cfg = SbmConfig {
            n_nodes: 7,
            p_in: 1.0,
            p_out: 1.0,
            ..SbmConfig::new(3, 2)
        };
        let (g, _) = generate_sbm(&cfg).unwrap();
        assert_eq!(g.n_edges(), 21);
    }

    #[test]
    fn config_validation() {
        assert!(SbmConfig { p_out: 0.7, ..SbmConfig::new(4, 4) }.validate().is_err());
        assert!(SbmConfig { p_in: 1.5, ..SbmConfig::new(4, 4) }.validate().is_err());
        assert!(SbmConfig::new(81, 4).validate().is_err());
        assert!(SbmConfig::new(4, 0).validate().is_err());
        assert!(SbmConfig::new(4, 4).validate().is_ok());
    }

    #[test]
    fn spectral_feature_properties() {
        let (g, _) = generate_sbm(&SbmConfig { n_nodes: 30, ..SbmConfig::new(3, 4) }.with_seed(5)).unwrap();
        let sf = spectral_features(g.laplacian(), 4).unwrap();
        assert!(!sf.disconnected);
        let x = sf.features.data();
        let c = 1.0 / libm::sqrt(30.0);
        assert!(x.column(0).iter().all(|v| (v - c).abs() < 1e-10));
        let gram = x.transpose() * x;
        assert!(linalg::max_abs(&(gram - Matrix::identity(4, 4))) < 1e-10);
        let lam = Matrix::from_diagonal(&nalgebra::DVector::from_vec(sf.eigenvalues.clone()));
        let resid = g.laplacian() * x - x * lam;
        assert!(libm::sqrt(linalg::frobenius_sq(&resid)) <= 1e-8);
        // Rayleigh sum against an independent eigenvalue computation.
        let mut all: std::vec::Vec<f64> = g.laplacian().clone().symmetric_eigenvalues().iter().copied().collect();
        all.sort_by(|a, b| a.total_cmp(b));
        let expected: f64 = all[..4].iter().sum();
        assert!((smoothness(x, g.laplacian()).unwrap() - expected).abs() < 1e-8);
    }

    #[test]
    fn spectral_features_flag_disconnected_graphs() {
        let g = GraphData::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let sf = spectral_features(g.laplacian(), 2).unwrap();
        assert!(sf.disconnected);
        assert!(spectral_features(g.laplacian(), 5).is_err());
    }

    #[test]
    fn sbm_scenarios() {
        let cfg = SbmConfig { n_nodes: 40, ..SbmConfig::new(4, 4) }.with_seed(3);
        let s0 = build_sbm_scenario(&cfg, 0, 3).unwrap();
        assert!(s0.truth.is_empty());
        assert_eq!(s0.graph, s0.clean_graph);

        let s = build_sbm_scenario(&cfg, 6, 3).unwrap();
        let labels = s.labels.as_ref().unwrap();
        assert_eq!(s.truth.len(), 6);
        for (i, j) in s.truth.iter() {
            assert_ne!(labels[i], labels[j]);
            assert!(s.graph.has_edge(i, j));
            assert!(!s.clean_graph.has_edge(i, j));
        }
        // the base graph does not depend on k
        assert_eq!(s.clean_graph, s0.clean_graph);
        assert_eq!(s, build_sbm_scenario(&cfg, 6, 3).unwrap());
    }

    #[test]
    fn attributed_scenarios() {
        let g = GraphData::from_edges(5, [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0)]).unwrap();
        let x = FeatureMatrix::new(Matrix::from_element(5, 2, 1.0)).unwrap();
        let s = build_attributed_scenario(&g, &x, 0, 1).unwrap();
        assert_eq!(s.graph, g);
        let s = build_attributed_scenario(&g, &x, 4, 1).unwrap();
        assert_eq!(s.truth.len(), 4);
        assert!(s.truth.iter().all(|(i, j)| !g.has_edge(i, j)));
        let complete = GraphData::from_adjacency(Matrix::from_fn(3, 3, |i, j| f64::from(u8::from(i != j)))).unwrap();
        let x3 = FeatureMatrix::new(Matrix::zeros(3, 1)).unwrap();
        assert!(build_attributed_scenario(&complete, &x3, 1, 0).is_err());
        let bad = FeatureMatrix::new(Matrix::zeros(4, 1)).unwrap();
        assert!(build_attributed_scenario(&g, &bad, 1, 0).is_err());
    }
}
