//! Repeated trials and parameter sweeps over a scenario family.
//!
//! Trial `t` of a run with master seed `s` uses seed `derive_seed(s, t)` both
//! to build its scenario and to seed the solver, so every detector evaluated
//! under the same master seed sees the same scenarios.

use std::hash::{DefaultHasher, Hash, Hasher};
use std::time::Instant;

use anomedge_core::datagen::{build_attributed_scenario, build_sbm_scenario, SbmConfig, Scenario};
use anomedge_core::eval::{detect, score, summarize, Detector, MetricSummary, MrrConvention, TrialMetrics};
use anomedge_core::rng::derive_seed;
use anomedge_core::{FeatureMatrix, GraphData};

use crate::error::{CliError, Result};
use crate::io::MetricRecord;

/// Source of per-trial scenarios.
#[derive(Debug, Clone)]
pub enum Family {
    /// Fresh SBM per trial; the config's own seed is replaced by the trial seed.
    Sbm { config: SbmConfig, anomalies: usize },
    /// Fixed attributed graph with fresh injections per trial.
    Attributed {
        graph: GraphData,
        features: FeatureMatrix,
        anomalies: usize,
    },
}

impl Family {
    pub fn build(&self, seed: u64) -> anomedge_core::Result<Scenario> {
        match self {
            Family::Sbm { config, anomalies } => {
                build_sbm_scenario(&config.clone().with_seed(seed), *anomalies, seed)
            }
            Family::Attributed {
                graph,
                features,
                anomalies,
            } => build_attributed_scenario(graph, features, *anomalies, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TrialOptions {
    /// Record wall time per solve. Off by default so reruns are byte-identical.
    pub timing: bool,
    pub convention: MrrConvention,
}

#[derive(Debug, Clone)]
pub struct TrialRun {
    pub seeds: Vec<u64>,
    pub trials: Vec<TrialMetrics>,
    /// Fingerprint of each trial's perturbed graph, features and truth.
    pub scenario_hashes: Vec<u64>,
    pub summary: MetricSummary,
    /// Mean candidate count (the summary's integer field truncates).
    pub mean_candidates: f64,
}

pub fn run_trials(
    family: &Family,
    detector: &Detector,
    n_trials: usize,
    master_seed: u64,
    opts: TrialOptions,
) -> Result<TrialRun> {
    if n_trials == 0 {
        return Err(CliError::config("trials must be at least 1"));
    }
    let mut seeds = Vec::with_capacity(n_trials);
    let mut trials = Vec::with_capacity(n_trials);
    let mut scenario_hashes = Vec::with_capacity(n_trials);
    for t in 0..n_trials {
        let seed = derive_seed(master_seed, t as u64);
        let fail = |e: anomedge_core::Error| {
            let mut err = CliError::from(e);
            err.message = format!("trial {t}: {}", err.message);
            err
        };
        let scenario = family.build(seed).map_err(fail)?;
        let start = Instant::now();
        let det = detect(detector, &scenario.graph, scenario.features.data(), seed).map_err(fail)?;
        let elapsed = start.elapsed().as_secs_f64();
        let mut metrics = score(&det.ranking, &scenario.truth, opts.convention).map_err(fail)?;
        metrics.runtime_seconds = if opts.timing { elapsed } else { 0.0 };
        seeds.push(seed);
        trials.push(metrics);
        scenario_hashes.push(fingerprint(&scenario));
    }
    let mean_candidates = trials.iter().map(|t| t.n_candidates as f64).sum::<f64>() / n_trials as f64;
    Ok(TrialRun {
        seeds,
        summary: summarize(&trials),
        trials,
        scenario_hashes,
        mean_candidates,
    })
}

pub fn fingerprint(scenario: &Scenario) -> u64 {
    let mut h = DefaultHasher::new();
    crate::io::format_edge_list(&scenario.graph).hash(&mut h);
    crate::io::format_matrix(scenario.features.data()).hash(&mut h);
    crate::io::format_truth(&scenario.truth).hash(&mut h);
    h.finish()
}

/// One configuration of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub id: usize,
    pub detector: Detector,
    /// Space-separated `key=value` description of the parameters.
    pub params: String,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub point: GridPoint,
    pub run: TrialRun,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub master_seed: u64,
}

/// Best row per metric; ties keep the earliest row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Best {
    pub h_at_10: usize,
    pub mrr: usize,
}

impl SweepReport {
    fn best_among<'a>(rows: impl Iterator<Item = &'a SweepRow> + Clone) -> Option<Best> {
        let argmax = |f: fn(&SweepRow) -> f64| {
            rows.clone()
                .fold(None::<&SweepRow>, |best, r| match best {
                    Some(b) if f(b) >= f(r) => Some(b),
                    _ => Some(r),
                })
                .map(|r| r.point.id)
        };
        Some(Best {
            h_at_10: argmax(|r| r.run.summary.mean.hit_at_10)?,
            mrr: argmax(|r| r.run.summary.mean.mrr)?,
        })
    }

    pub fn best(&self) -> Option<Best> {
        Self::best_among(self.rows.iter())
    }

    /// Best rows per solver id, in first-appearance order.
    pub fn best_per_solver(&self) -> Vec<(&'static str, Best)> {
        let mut ids: Vec<&'static str> = Vec::new();
        for r in &self.rows {
            let id = r.point.detector.id();
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        ids.into_iter()
            .filter_map(|id| {
                Self::best_among(self.rows.iter().filter(move |r| r.point.detector.id() == id)).map(|b| (id, b))
            })
            .collect()
    }

    pub fn row(&self, id: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.point.id == id)
    }
}

pub fn sweep(
    grid: &[GridPoint],
    family: &Family,
    n_trials: usize,
    master_seed: u64,
    opts: TrialOptions,
) -> Result<SweepReport> {
    if grid.is_empty() {
        return Err(CliError::config("sweep grid is empty"));
    }
    let rows = grid
        .iter()
        .map(|point| {
            let run = run_trials(family, &point.detector, n_trials, master_seed, opts).map_err(|mut e| {
                e.message = format!("grid point {}: {}", point.id, e.message);
                e
            })?;
            Ok(SweepRow {
                point: point.clone(),
                run,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { rows, master_seed })
}

/// Per-trial records followed by the aggregate record.
pub fn records(solver: &str, grid_point: usize, master_seed: u64, run: &TrialRun) -> Vec<MetricRecord> {
    let mut out: Vec<MetricRecord> = run
        .trials
        .iter()
        .zip(&run.seeds)
        .map(|(t, &seed)| MetricRecord {
            solver: solver.to_string(),
            grid_point,
            seed,
            h_at_10: t.hit_at_10,
            mrr: t.mrr,
            n_candidates: t.n_candidates as f64,
            runtime_seconds: t.runtime_seconds,
            aggregate: false,
            n_trials: None,
            std_h_at_10: None,
            std_mrr: None,
        })
        .collect();
    let s = &run.summary;
    out.push(MetricRecord {
        solver: solver.to_string(),
        grid_point,
        seed: master_seed,
        h_at_10: s.mean.hit_at_10,
        mrr: s.mean.mrr,
        n_candidates: run.mean_candidates,
        runtime_seconds: s.mean.runtime_seconds,
        aggregate: true,
        n_trials: Some(s.n_trials),
        std_h_at_10: Some(s.std_hit_at_10),
        std_mrr: Some(s.std_mrr),
    });
    out
}
