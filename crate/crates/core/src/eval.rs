//! Candidate extraction, ranking metrics and the detector dispatch shared by
//! trial runners.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::als::{solve_als, AlsParams};
use crate::datagen::Scenario;
use crate::graph::{adjacency_from_laplacian, EdgeSet, GraphData};
use crate::recovery::{solve_graphical_lasso, solve_recovery, RecoveryParams};
use crate::rng::{self, stream};
use crate::{linalg, Error, Matrix, Result};

/// Default magnitude below which an entry of `S` counts as zero.
pub const ZERO_TOL: f64 = 1e-9;

/// Candidate anomalous edges, most negative score first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidates {
    pub entries: Vec<((usize, usize), f64)>,
    pub source: String,
}

impl RankedCandidates {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.entries.iter().map(|&(e, _)| e).collect()
    }
}

/// Collects pairs whose symmetrized score `(S_ij + S_ji)/2` is below
/// `-zero_tol`, sorted ascending with ties broken by `(i, j)`.
pub fn extract_candidates(s: &Matrix, zero_tol: f64, source: &str) -> RankedCandidates {
    let n = s.nrows().min(s.ncols());
    let mut entries = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let score = 0.5 * (s[(i, j)] + s[(j, i)]);
            if score < -zero_tol {
                entries.push(((i, j), score));
            }
        }
    }
    entries.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    RankedCandidates {
        entries,
        source: source.into(),
    }
}

fn require_truth(truth: &EdgeSet) -> Result<()> {
    if truth.is_empty() {
        Err(Error::UndefinedMetric("ground-truth edge set is empty"))
    } else {
        Ok(())
    }
}

/// Percentage of the first `k` ranked edges that are true anomalies,
/// normalized by `min(k, |truth|)`.
pub fn hit_at_k(ranked: &[(usize, usize)], truth: &EdgeSet, k: usize) -> Result<f64> {
    require_truth(truth)?;
    if k == 0 {
        return Err(Error::UndefinedMetric("k must be positive"));
    }
    let hits = ranked.iter().take(k).filter(|&&(i, j)| truth.contains(i, j)).count();
    Ok(100.0 * hits as f64 / k.min(truth.len()) as f64)
}

pub fn hit_at_10(ranked: &[(usize, usize)], truth: &EdgeSet) -> Result<f64> {
    hit_at_k(ranked, truth, 10)
}

/// What the reciprocal-rank sum is divided by.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MrrConvention {
    /// Number of correctly identified anomalies.
    #[default]
    Hits,
    /// Number of true anomalies.
    Truth,
}

/// Mean reciprocal rank over full-list positions, as a percentage.
pub fn mrr(ranked: &[(usize, usize)], truth: &EdgeSet, convention: MrrConvention) -> Result<f64> {
    require_truth(truth)?;
    let mut sum = 0.0;
    let mut hits = 0usize;
    for (pos, &(i, j)) in ranked.iter().enumerate() {
        if truth.contains(i, j) {
            sum += 1.0 / (pos + 1) as f64;
            hits += 1;
        }
    }
    let denom = match convention {
        MrrConvention::Hits => hits,
        MrrConvention::Truth => truth.len(),
    };
    if hits == 0 {
        return Ok(0.0);
    }
    Ok(100.0 * sum / denom as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrialMetrics {
    pub hit_at_10: f64,
    pub mrr: f64,
    pub n_candidates: usize,
    /// Wall time of the solve. Left at zero by this crate, which has no clock.
    pub runtime_seconds: f64,
}

pub fn score(ranked: &[(usize, usize)], truth: &EdgeSet, convention: MrrConvention) -> Result<TrialMetrics> {
    Ok(TrialMetrics {
        hit_at_10: hit_at_10(ranked, truth)?,
        mrr: mrr(ranked, truth, convention)?,
        n_candidates: ranked.len(),
        runtime_seconds: 0.0,
    })
}

/// Edges of `g` in a uniformly random order drawn from the random-guess
/// substream of `seed`.
pub fn random_ranking(g: &GraphData, seed: u64) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = g.edges().iter().collect();
    let mut rng = rng::substream(seed, stream::RANDOM_GUESS);
    edges.shuffle(&mut rng);
    edges
}

/// Scores a random permutation of the perturbed graph's edges.
pub fn random_guess_baseline(g: &GraphData, truth: &EdgeSet, seed: u64) -> Result<TrialMetrics> {
    score(&random_ranking(g, seed), truth, MrrConvention::default())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologyError {
    /// `||A_est - A_true||_F / ||A_true||_F`.
    pub frobenius_error: f64,
    /// F1 of `{A_est > threshold}` against `{A_true > 0}` over `i < j`.
    pub edge_f1: f64,
}

pub fn topology_error(a_est: &Matrix, a_true: &Matrix, threshold: f64) -> Result<TopologyError> {
    if a_est.shape() != a_true.shape() {
        return Err(Error::dims("topology comparison", a_true.shape(), a_est.shape()));
    }
    let norm_true = libm::sqrt(linalg::frobenius_sq(a_true));
    if norm_true == 0.0 {
        return Err(Error::UndefinedMetric("reference adjacency is zero"));
    }
    let frobenius_error = libm::sqrt(linalg::frobenius_sq(&(a_est - a_true))) / norm_true;
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    let n = a_true.nrows();
    for i in 0..n {
        for j in (i + 1)..n.min(a_true.ncols()) {
            match (a_est[(i, j)] > threshold, a_true[(i, j)] > 0.0) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                (false, false) => {}
            }
        }
    }
    let denom = 2 * tp + fp + fneg;
    let edge_f1 = if denom == 0 { 1.0 } else { 2.0 * tp as f64 / denom as f64 };
    Ok(TopologyError {
        frobenius_error,
        edge_f1,
    })
}

/// ℓ1 weight of the graphical-lasso topology baseline.
pub const GLASSO_BETA: f64 = 0.01;

/// Baseline topology estimate from features alone: graphical lasso precision
/// read as a Laplacian, negative off-diagonals becoming edge weights.
pub fn glasso_adjacency(x: &Matrix, beta: f64) -> Result<Matrix> {
    let res = solve_graphical_lasso(x, beta, 1.0, 2000, 1e-5)?;
    adjacency_from_laplacian(&linalg::symmetrize(&res.theta), 1e-9)
}

/// Mean and standard deviation of a set of trials.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MetricSummary {
    pub n_trials: usize,
    pub mean: TrialMetrics,
    pub std_hit_at_10: f64,
    pub std_mrr: f64,
}

/// Aggregates in index order; the standard deviation is the population one.
pub fn summarize(trials: &[TrialMetrics]) -> MetricSummary {
    let n = trials.len();
    if n == 0 {
        return MetricSummary::default();
    }
    let nf = n as f64;
    let mean_of = |f: &dyn Fn(&TrialMetrics) -> f64| trials.iter().map(f).sum::<f64>() / nf;
    let h = mean_of(&|t| t.hit_at_10);
    let m = mean_of(&|t| t.mrr);
    let var = |f: &dyn Fn(&TrialMetrics) -> f64, mu: f64| {
        trials.iter().map(|t| (f(t) - mu) * (f(t) - mu)).sum::<f64>() / nf
    };
    MetricSummary {
        n_trials: n,
        mean: TrialMetrics {
            hit_at_10: h,
            mrr: m,
            n_candidates: (trials.iter().map(|t| t.n_candidates as f64).sum::<f64>() / nf) as usize,
            runtime_seconds: mean_of(&|t| t.runtime_seconds),
        },
        std_hit_at_10: libm::sqrt(var(&|t| t.hit_at_10, h)),
        std_mrr: libm::sqrt(var(&|t| t.mrr, m)),
    }
}

/// Anomaly detectors compared by the evaluation protocol.
#[derive(Debug, Clone, PartialEq)]
pub enum Detector {
    /// Alternating least squares with feature smoothness.
    Als(AlsParams),
    /// Low-rank + sparse without smoothness: ALS with `γ` forced to zero.
    Baseline(AlsParams),
    /// ADMM Laplacian recovery.
    Recovery(RecoveryParams),
    /// Uniformly random ordering of the perturbed graph's edges.
    Random,
}

impl Detector {
    pub fn id(&self) -> &'static str {
        match self {
            Detector::Als(_) => "als",
            Detector::Baseline(_) => "baseline",
            Detector::Recovery(_) => "recovery",
            Detector::Random => "random",
        }
    }
}

/// Output of one detector run.
#[derive(Debug, Clone)]
pub struct Detection {
    /// Ranked candidates; scores are absent for the random detector.
    pub ranking: Vec<(usize, usize)>,
    pub scores: Option<Vec<f64>>,
    /// Recovered Laplacian, for the recovery detector.
    pub laplacian: Option<Matrix>,
}

/// Runs a detector on a perturbed graph with features. `seed` drives the
/// random detector and the ALS initialization.
pub fn detect(detector: &Detector, g: &GraphData, x: &Matrix, seed: u64) -> Result<Detection> {
    let from_s = |s: &Matrix, laplacian: Option<Matrix>| {
        let ranked = extract_candidates(s, ZERO_TOL, detector.id());
        Detection {
            ranking: ranked.edges(),
            scores: Some(ranked.entries.iter().map(|&(_, v)| v).collect()),
            laplacian,
        }
    };
    match detector {
        Detector::Als(p) => {
            let res = solve_als(g.laplacian(), x, &p.clone().with_seed(seed))?;
            Ok(from_s(&res.s, None))
        }
        Detector::Baseline(p) => {
            let p = AlsParams { gamma: 0.0, ..p.clone() }.with_seed(seed);
            let res = solve_als(g.laplacian(), x, &p)?;
            Ok(from_s(&res.s, None))
        }
        Detector::Recovery(p) => {
            let res = solve_recovery(g.laplacian(), x, p)?;
            Ok(from_s(&res.s, Some(res.r)))
        }
        Detector::Random => Ok(Detection {
            ranking: random_ranking(g, seed),
            scores: None,
            laplacian: None,
        }),
    }
}

/// Detects on a scenario and scores against its truth.
pub fn evaluate(detector: &Detector, scenario: &Scenario, seed: u64) -> Result<(Detection, TrialMetrics)> {
    let det = detect(detector, &scenario.graph, scenario.features.data(), seed)?;
    let metrics = score(&det.ranking, &scenario.truth, MrrConvention::default())?;
    Ok((det, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    fn truth(pairs: &[(usize, usize)]) -> EdgeSet {
        pairs.iter().copied().collect()
    }

    #[test]
    fn extraction_examples() {
        assert!(extract_candidates(&Matrix::zeros(5, 5), ZERO_TOL, "t").is_empty());

        let mut s = Matrix::zeros(6, 6);
        s[(1, 2)] = -0.9;
        s[(2, 1)] = -0.9;
        s[(3, 4)] = -0.1;
        s[(4, 3)] = -0.1;
        s[(2, 5)] = 0.3;
        s[(5, 2)] = 0.3;
        let r = extract_candidates(&s, ZERO_TOL, "t");
        assert_eq!(r.edges(), vec![(1, 2), (3, 4)]);

        let mut s = Matrix::zeros(4, 4);
        for &(i, j) in &[(0, 3), (0, 2)] {
            s[(i, j)] = -0.5;
            s[(j, i)] = -0.5;
        }
        assert_eq!(extract_candidates(&s, ZERO_TOL, "t").edges(), vec![(0, 2), (0, 3)]);
    }

    #[test]
    fn extraction_symmetrizes() {
        let mut s = Matrix::zeros(3, 3);
        s[(0, 1)] = -1.0;
        s[(1, 0)] = 0.4;
        let r = extract_candidates(&s, ZERO_TOL, "t");
        assert_eq!(r.entries, vec![((0, 1), -0.3)]);
        s[(1, 0)] = 1.0;
        assert!(extract_candidates(&s, ZERO_TOL, "t").is_empty());
    }

    #[test]
    fn hit_at_10_examples() {
        let ranked: Vec<(usize, usize)> = (0..10).map(|k| (k, k + 1)).collect();
        let all = truth(&ranked);
        assert_eq!(hit_at_10(&ranked, &all).unwrap(), 100.0);
        let none = truth(&[(20, 21)]);
        assert_eq!(hit_at_10(&ranked, &none).unwrap(), 0.0);
        let mut half: Vec<(usize, usize)> = ranked[..5].to_vec();
        half.extend((30..35).map(|k| (k, k + 1)));
        assert_eq!(hit_at_10(&ranked, &truth(&half)).unwrap(), 50.0);
        assert!(hit_at_10(&ranked, &EdgeSet::new()).is_err());
    }

    #[test]
    fn mrr_examples() {
        let ranked = vec![(0, 1), (1, 2), (2, 3), (3, 4)];
        assert_eq!(mrr(&ranked, &truth(&[(0, 1)]), MrrConvention::Hits).unwrap(), 100.0);
        assert_eq!(mrr(&ranked, &truth(&[(0, 1), (3, 4)]), MrrConvention::Hits).unwrap(), 62.5);
        assert_eq!(mrr(&ranked, &truth(&[(1, 2), (7, 8)]), MrrConvention::Truth).unwrap(), 25.0);
        assert_eq!(mrr(&ranked, &truth(&[(7, 8)]), MrrConvention::Hits).unwrap(), 0.0);
        assert!(mrr(&ranked, &EdgeSet::new(), MrrConvention::Hits).is_err());
    }

    #[test]
    fn random_guess_with_all_edges_true() {
        let g = GraphData::from_edges(12, (0..11).map(|i| (i, i + 1, 1.0))).unwrap();
        let t = g.edges();
        for seed in 0..5 {
            assert_eq!(random_guess_baseline(&g, &t, seed).unwrap().hit_at_10, 100.0);
        }
    }

    #[test]
    fn topology_error_examples() {
        let g = GraphData::from_edges(6, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (0, 5, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 4, 1.0), (3, 5, 1.0)]).unwrap();
        let a = g.adjacency();
        let e = topology_error(a, a, 0.5).unwrap();
        assert_eq!((e.frobenius_error, e.edge_f1), (0.0, 1.0));
        let e = topology_error(&Matrix::zeros(6, 6), a, 0.5).unwrap();
        assert_eq!((e.frobenius_error, e.edge_f1), (1.0, 0.0));
        let mut extra = a.clone();
        extra[(0, 3)] = 1.0;
        extra[(3, 0)] = 1.0;
        let e = topology_error(&extra, a, 0.5).unwrap();
        assert!((e.edge_f1 - 20.0 / 21.0).abs() < 1e-15);
        assert!(topology_error(a, &Matrix::zeros(6, 6), 0.5).is_err());
        assert!(topology_error(&Matrix::zeros(5, 5), a, 0.5).is_err());
    }

    #[test]
    fn summary_of_one_trial() {
        let t = TrialMetrics {
            hit_at_10: 40.0,
            mrr: 12.5,
            n_candidates: 7,
            runtime_seconds: 0.0,
        };
        let s = summarize(&[t]);
        assert_eq!(s.mean, t);
        assert_eq!((s.std_hit_at_10, s.std_mrr), (0.0, 0.0));
    }
}
