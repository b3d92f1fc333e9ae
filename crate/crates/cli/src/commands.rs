//! The five commands. Each resolves its settings up front (so the manifest
//! is complete before any work starts), computes every output in memory, and
//! only then writes files.

use std::fmt::{self, Display};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anomedge_core::als::AlsParams;
use anomedge_core::datagen::{build_attributed_scenario, build_sbm_scenario, SbmConfig, Scenario};
use anomedge_core::eval::{self, Detector, MrrConvention, TrialMetrics};
use anomedge_core::graph::adjacency_from_laplacian;
use anomedge_core::recovery::{RecoveryParams, TraceFloor};
use serde::Serialize;

use crate::config::{Config, Settings, MANIFEST_FILE};
use crate::error::{CliError, Kind, Result};
use crate::io;
use crate::trials::{self, Family, GridPoint, TrialOptions, TrialRun};

pub const COMMANDS: [&str; 5] = ["generate", "perturb", "detect", "sweep", "heatmap"];

/// Output file names.
pub mod files {
    pub const CLEAN: &str = "clean.edges";
    pub const PERTURBED: &str = "perturbed.edges";
    pub const FEATURES: &str = "features.csv";
    pub const TRUTH: &str = "truth.tsv";
    pub const CANDIDATES: &str = "candidates.tsv";
    pub const METRICS: &str = "metrics.jsonl";
    pub const LAPLACIAN: &str = "recovered_laplacian.csv";
    pub const ADJACENCY: &str = "recovered_adjacency.csv";
    pub const TABLE: &str = "table.tsv";
    pub const BEST: &str = "best.tsv";
    pub const TOPOLOGY: &str = "topology.jsonl";
}

/// Tolerance on the asymmetry of a recovered Laplacian when reading off
/// its adjacency.
const RECOVERED_SYMMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Human-readable result lines for stdout.
    pub summary: Vec<String>,
}

/// Runs `command` with the given (already merged) configuration.
pub fn run(command: &str, config: Config) -> Result<Outcome> {
    let s = Settings::new(command, config)?;
    match command {
        "generate" => cmd_generate(s),
        "perturb" => cmd_perturb(s),
        "detect" => cmd_detect(s),
        "sweep" => cmd_sweep(s),
        "heatmap" => cmd_heatmap(s),
        other => Err(CliError::new(Kind::Usage, format!("unknown command `{other}`"))),
    }
}

fn write_all(out_dir: &Path, manifest: &Config, outputs: Vec<(String, String)>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut written = Vec::with_capacity(outputs.len() + 1);
    for (name, text) in outputs.into_iter().chain([(MANIFEST_FILE.to_string(), manifest.render())]) {
        let path = out_dir.join(name);
        io::write_text(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}

/// Solver ids accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Als,
    Baseline,
    Recovery,
    Random,
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "als" => Ok(Self::Als),
            "baseline" => Ok(Self::Baseline),
            "recovery" => Ok(Self::Recovery),
            "random" => Ok(Self::Random),
            _ => Err("expected one of als, baseline, recovery, random".into()),
        }
    }
}

impl Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Als => "als",
            Self::Baseline => "baseline",
            Self::Recovery => "recovery",
            Self::Random => "random",
        })
    }
}

/// `budget:K`, `fraction:F` or `absolute:M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloorSpec(pub TraceFloor);

impl FromStr for FloorSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, value) = s
            .split_once(':')
            .ok_or("expected budget:K, fraction:F or absolute:M")?;
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| e.to_string());
        Ok(Self(match kind.trim() {
            "budget" => TraceFloor::AnomalyBudget(value.trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())?),
            "fraction" => TraceFloor::Fraction(num(value)?),
            "absolute" => TraceFloor::Absolute(num(value)?),
            other => return Err(format!("unknown trace floor kind `{other}`")),
        }))
    }
}

impl Display for FloorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            TraceFloor::AnomalyBudget(k) => write!(f, "budget:{k}"),
            TraceFloor::Fraction(x) => write!(f, "fraction:{x}"),
            TraceFloor::Absolute(m) => write!(f, "absolute:{m}"),
        }
    }
}

/// `hits` (divide by the number of identified anomalies) or `truth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Convention(pub MrrConvention);

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "hits" => Ok(Self(MrrConvention::Hits)),
            "truth" => Ok(Self(MrrConvention::Truth)),
            _ => Err("expected hits or truth".into()),
        }
    }
}

impl Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            MrrConvention::Hits => "hits",
            MrrConvention::Truth => "truth",
        })
    }
}

fn sbm_settings(s: &mut Settings) -> Result<SbmConfig> {
    let cfg = SbmConfig {
        n_communities: s.get_or("communities", 4)?,
        n_features: s.get_or("n_features", 4)?,
        n_nodes: s.get_or("nodes", SbmConfig::DEFAULT_N_NODES)?,
        p_in: s.get_or("p_in", SbmConfig::DEFAULT_P_IN)?,
        p_out: s.get_or("p_out", SbmConfig::DEFAULT_P_OUT)?,
        seed: 0,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn require_path(s: &mut Settings, key: &str) -> Result<PathBuf> {
    s.path(key)?
        .ok_or_else(|| CliError::config(format!("missing required setting `{key}`")))
}

fn scenario_outputs(scenario: &Scenario) -> Vec<(String, String)> {
    vec![
        (files::CLEAN.into(), io::format_edge_list(&scenario.clean_graph)),
        (files::PERTURBED.into(), io::format_edge_list(&scenario.graph)),
        (files::FEATURES.into(), io::format_matrix(scenario.features.data())),
        (files::TRUTH.into(), io::format_truth(&scenario.truth)),
    ]
}

fn scenario_summary(scenario: &Scenario) -> Vec<String> {
    vec![format!(
        "nodes={} edges={} injected={}",
        scenario.graph.n_nodes(),
        scenario.graph.n_edges(),
        scenario.truth.len()
    )]
}

/// Samples an SBM scenario: clean and perturbed edge lists, spectral
/// features, injected edges.
pub fn cmd_generate(mut s: Settings) -> Result<Outcome> {
    let out_dir = s.out_dir();
    let seed: u64 = s.get_or("seed", 0)?;
    let cfg = sbm_settings(&mut s)?.with_seed(seed);
    let k: usize = s.get_or("anomalies", 10)?;
    let manifest = s.finish()?;

    let scenario = build_sbm_scenario(&cfg, k, seed)?;
    let files = write_all(&out_dir, &manifest, scenario_outputs(&scenario))?;
    Ok(Outcome {
        out_dir,
        files,
        summary: scenario_summary(&scenario),
    })
}

/// Injects anomalies uniformly among the non-edges of a given attributed graph.
pub fn cmd_perturb(mut s: Settings) -> Result<Outcome> {
    let out_dir = s.out_dir();
    let graph_path = require_path(&mut s, "graph")?;
    let features_path = require_path(&mut s, "features")?;
    let seed: u64 = s.get_or("seed", 0)?;
    let k: usize = s.get_or("anomalies", 10)?;
    let manifest = s.finish()?;

    let g = io::read_edge_list(&graph_path)?;
    let x = io::read_features(&features_path)?;
    io::check_feature_rows(&x, &g)?;
    let scenario = build_attributed_scenario(&g, &x, k, seed)?;
    let files = write_all(&out_dir, &manifest, scenario_outputs(&scenario))?;
    Ok(Outcome {
        out_dir,
        files,
        summary: scenario_summary(&scenario),
    })
}

/// Reloads the files written by `generate` or `perturb`. Community labels
/// are recomputed from the manifest of an SBM scenario.
pub fn load_scenario(dir: &Path) -> Result<Scenario> {
    let manifest = Config::load(&dir.join(MANIFEST_FILE))?;
    let graph = io::read_edge_list(&dir.join(files::PERTURBED))?;
    let clean_graph = io::read_edge_list(&dir.join(files::CLEAN))?;
    let features = io::read_features(&dir.join(files::FEATURES))?;
    io::check_feature_rows(&features, &graph)?;
    let truth = io::read_truth(&dir.join(files::TRUTH))?;
    let labels = if manifest.get("command") == Some("generate") {
        let mut s = Settings::new("generate", manifest)?;
        Some(sbm_settings(&mut s)?.labels())
    } else {
        None
    };
    Ok(Scenario {
        graph,
        clean_graph,
        features,
        truth,
        labels,
    })
}

fn detector_settings(s: &mut Settings, solver: SolverKind, n_nodes: usize) -> Result<Detector> {
    let default_rank = AlsParams::default_rank(n_nodes, None);
    let als = |s: &mut Settings, defaults: AlsParams, with_gamma: bool| -> Result<AlsParams> {
        let p = AlsParams {
            lambda: s.get_or("lambda", defaults.lambda)?,
            mu: s.get_or("mu", defaults.mu)?,
            gamma: if with_gamma { s.get_or("gamma", defaults.gamma)? } else { 0.0 },
            rank_bound: s.get_or("rank", defaults.rank_bound)?,
            max_iters: s.get_or("max_iters", defaults.max_iters)?,
            rel_tol: s.get_or("rel_tol", defaults.rel_tol)?,
            seed: 0,
        };
        p.validate(n_nodes)?;
        Ok(p)
    };
    Ok(match solver {
        SolverKind::Als => Detector::Als(als(s, AlsParams::smooth(default_rank), true)?),
        SolverKind::Baseline => Detector::Baseline(als(s, AlsParams::baseline(default_rank), false)?),
        SolverKind::Recovery => {
            let d = RecoveryParams::default();
            let p = RecoveryParams {
                lambda: s.get_or("lambda", d.lambda)?,
                mu: s.get_or("mu", d.mu)?,
                alpha: s.get_or("alpha", d.alpha)?,
                beta: s.get_or("beta", d.beta)?,
                kappa: s.get_or("kappa", d.kappa)?,
                rho: s.get_or("rho", d.rho)?,
                trace_floor: s.get_or("trace_floor", FloorSpec(d.trace_floor))?.0,
                max_iters: s.get_or("max_iters", d.max_iters)?,
                res_tol: s.get_or("res_tol", d.res_tol)?,
                ..d
            };
            p.validate()?;
            Detector::Recovery(p)
        }
        SolverKind::Random => Detector::Random,
    })
}

/// Runs one detector on a graph with features; scores it when a truth file
/// is given.
pub fn cmd_detect(mut s: Settings) -> Result<Outcome> {
    let out_dir = s.out_dir();
    let graph_path = require_path(&mut s, "graph")?;
    let features_path = require_path(&mut s, "features")?;
    let truth_path = s.path("truth")?;
    let solver: SolverKind = s.get_or("solver", SolverKind::Als)?;
    let seed: u64 = s.get_or("seed", 0)?;
    let timing: bool = s.get_or("timing", false)?;
    let convention = truth_path
        .is_some()
        .then(|| s.get_or("mrr_convention", Convention(MrrConvention::default())))
        .transpose()?;

    // Parameter defaults depend on the graph size, so the inputs are read
    // before the manifest is closed.
    let g = io::read_edge_list(&graph_path)?;
    let x = io::read_features(&features_path)?;
    io::check_feature_rows(&x, &g)?;
    let truth = truth_path.as_deref().map(io::read_truth).transpose()?;
    if let Some(node) = truth.as_ref().and_then(|t| t.max_node()).filter(|&m| m >= g.n_nodes()) {
        return Err(CliError::new(
            Kind::Dimension,
            format!("truth references node {node} but the graph has {} nodes", g.n_nodes()),
        ));
    }
    let detector = detector_settings(&mut s, solver, g.n_nodes())?;
    let manifest = s.finish()?;

    let start = Instant::now();
    let det = eval::detect(&detector, &g, x.data(), seed)?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut outputs = vec![(
        files::CANDIDATES.to_string(),
        io::format_candidates(&det.ranking, det.scores.as_deref()),
    )];
    let mut summary = vec![format!("solver={solver} candidates={}", det.ranking.len())];
    if let (Some(truth), Some(Convention(conv))) = (&truth, convention) {
        let mut m: TrialMetrics = eval::score(&det.ranking, truth, conv)?;
        m.runtime_seconds = if timing { elapsed } else { 0.0 };
        let run = TrialRun {
            seeds: vec![seed],
            trials: vec![m],
            scenario_hashes: Vec::new(),
            summary: eval::summarize(&[m]),
            mean_candidates: m.n_candidates as f64,
        };
        outputs.push((
            files::METRICS.into(),
            io::format_records(&trials::records(&solver.to_string(), 0, seed, &run)),
        ));
        summary.push(format!("h_at_10={} mrr={}", m.hit_at_10, m.mrr));
    }
    if let Some(r) = &det.laplacian {
        let a = adjacency_from_laplacian(r, RECOVERED_SYMMETRY_TOL)?;
        outputs.push((files::LAPLACIAN.into(), io::format_matrix(r)));
        outputs.push((files::ADJACENCY.into(), io::format_matrix(&a)));
    }
    let files = write_all(&out_dir, &manifest, outputs)?;
    Ok(Outcome { out_dir, files, summary })
}

/// Axis values for `key`: the solver-prefixed key, else the shared key, else
/// the single default (recorded under the prefixed key).
fn axis<T: FromStr + Display + Clone>(s: &mut Settings, solver: SolverKind, key: &str, default: T) -> Result<Vec<T>>
where
    T::Err: Display,
{
    let prefixed = format!("{solver}.{key}");
    if let Some(v) = s.list(&prefixed)? {
        return Ok(v);
    }
    if let Some(v) = s.list(key)? {
        return Ok(v);
    }
    s.list_or(&prefixed, &[default])
}

fn grid_for(
    s: &mut Settings,
    solver: SolverKind,
    n_nodes: usize,
    default_rank: usize,
    default_floor: TraceFloor,
    grid: &mut Vec<GridPoint>,
) -> Result<()> {
    let mut push = |detector: Detector, params: String| {
        grid.push(GridPoint {
            id: grid.len(),
            detector,
            params,
        })
    };
    match solver {
        SolverKind::Als | SolverKind::Baseline => {
            let smooth = solver == SolverKind::Als;
            let d = if smooth {
                AlsParams::smooth(default_rank)
            } else {
                AlsParams::baseline(default_rank)
            };
            let lambdas = axis(s, solver, "lambda", d.lambda)?;
            let mus = axis(s, solver, "mu", d.mu)?;
            let gammas = if smooth { axis(s, solver, "gamma", d.gamma)? } else { vec![0.0] };
            let ranks = axis(s, solver, "rank", d.rank_bound)?;
            let max_iters = s.get_or(&format!("{solver}.max_iters"), d.max_iters)?;
            let rel_tol = s.get_or(&format!("{solver}.rel_tol"), d.rel_tol)?;
            for &lambda in &lambdas {
                for &mu in &mus {
                    for &gamma in &gammas {
                        for &rank in &ranks {
                            let p = AlsParams {
                                max_iters,
                                rel_tol,
                                ..AlsParams::new(lambda, mu, gamma, rank)
                            };
                            p.validate(n_nodes)?;
                            if smooth {
                                push(
                                    Detector::Als(p),
                                    format!("lambda={lambda} mu={mu} gamma={gamma} rank={rank}"),
                                );
                            } else {
                                push(Detector::Baseline(p), format!("lambda={lambda} mu={mu} rank={rank}"));
                            }
                        }
                    }
                }
            }
        }
        SolverKind::Recovery => {
            let d = RecoveryParams {
                trace_floor: default_floor,
                ..RecoveryParams::default()
            };
            let lambdas = axis(s, solver, "lambda", d.lambda)?;
            let mus = axis(s, solver, "mu", d.mu)?;
            let alphas = axis(s, solver, "alpha", d.alpha)?;
            let betas = axis(s, solver, "beta", d.beta)?;
            let kappas = axis(s, solver, "kappa", d.kappa)?;
            let rhos = axis(s, solver, "rho", d.rho)?;
            let floors = axis(s, solver, "trace_floor", FloorSpec(d.trace_floor))?;
            let max_iters = s.get_or("recovery.max_iters", d.max_iters)?;
            let res_tol = s.get_or("recovery.res_tol", d.res_tol)?;
            for &lambda in &lambdas {
                for &mu in &mus {
                    for &alpha in &alphas {
                        for &beta in &betas {
                            for &kappa in &kappas {
                                for &rho in &rhos {
                                    for &floor in &floors {
                                        let p = RecoveryParams {
                                            lambda,
                                            mu,
                                            alpha,
                                            beta,
                                            kappa,
                                            rho,
                                            trace_floor: floor.0,
                                            max_iters,
                                            res_tol,
                                            ..d.clone()
                                        };
                                        p.validate()?;
                                        push(
                                            Detector::Recovery(p),
                                            format!(
                                                "lambda={lambda} mu={mu} alpha={alpha} beta={beta} \
                                                 kappa={kappa} rho={rho} trace_floor={floor}"
                                            ),
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        SolverKind::Random => push(Detector::Random, String::new()),
    }
    Ok(())
}

/// Cross-product parameter sweep, `trials` scenarios per grid point.
pub fn cmd_sweep(mut s: Settings) -> Result<Outcome> {
    let out_dir = s.out_dir();
    let seed: u64 = s.get_or("seed", 0)?;
    let n_trials: usize = s.get_or("trials", 10)?;
    let timing: bool = s.get_or("timing", false)?;
    let convention = s.get_or("mrr_convention", Convention(MrrConvention::default()))?;
    let k: usize = s.get_or("anomalies", 10)?;
    let family_kind: String = s.get_or("family", "sbm".to_string())?;
    let (family, n_nodes, default_rank) = match family_kind.as_str() {
        "sbm" => {
            let config = sbm_settings(&mut s)?;
            let (n, c) = (config.n_nodes, config.n_communities);
            (Family::Sbm { config, anomalies: k }, n, AlsParams::default_rank(n, Some(c)))
        }
        "attributed" => {
            let g = io::read_edge_list(&require_path(&mut s, "graph")?)?;
            let x = io::read_features(&require_path(&mut s, "features")?)?;
            io::check_feature_rows(&x, &g)?;
            let n = g.n_nodes();
            let family = Family::Attributed {
                graph: g,
                features: x,
                anomalies: k,
            };
            (family, n, AlsParams::default_rank(n, None))
        }
        other => return Err(CliError::config(format!("unknown family `{other}`; expected sbm or attributed"))),
    };
    let solvers = s.list_or("solver", &[SolverKind::Als])?;
    let mut grid = Vec::new();
    for (i, &solver) in solvers.iter().enumerate() {
        if solvers[..i].contains(&solver) {
            return Err(CliError::config(format!("solver `{solver}` listed twice")));
        }
        grid_for(&mut s, solver, n_nodes, default_rank, TraceFloor::AnomalyBudget(k), &mut grid)?;
    }
    let manifest = s.finish()?;

    let opts = TrialOptions {
        timing,
        convention: convention.0,
    };
    let report = trials::sweep(&grid, &family, n_trials, seed, opts)?;

    let mut records = Vec::new();
    let mut table = String::from("id\tsolver\tparams\th_at_10\tstd_h_at_10\tmrr\tstd_mrr\tn_candidates\truntime_seconds\n");
    for row in &report.rows {
        let solver = row.point.detector.id();
        records.extend(trials::records(solver, row.point.id, seed, &row.run));
        let m = &row.run.summary;
        table.push_str(&format!(
            "{}\t{solver}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            row.point.id,
            row.point.params,
            m.mean.hit_at_10,
            m.std_hit_at_10,
            m.mean.mrr,
            m.std_mrr,
            row.run.mean_candidates,
            m.mean.runtime_seconds
        ));
    }
    let mut best = String::from("solver\tmetric\tid\tvalue\n");
    let mut summary = Vec::new();
    let mut best_rows: Vec<(&str, trials::Best)> = report.best_per_solver();
    if let Some(b) = report.best() {
        best_rows.push(("all", b));
    }
    for (solver, b) in best_rows {
        let h = report.row(b.h_at_10).expect("best row exists").run.summary.mean.hit_at_10;
        let m = report.row(b.mrr).expect("best row exists").run.summary.mean.mrr;
        best.push_str(&format!("{solver}\th_at_10\t{}\t{h}\n{solver}\tmrr\t{}\t{m}\n", b.h_at_10, b.mrr));
        summary.push(format!("{solver}: best h_at_10={h} (row {}) best mrr={m} (row {})", b.h_at_10, b.mrr));
    }
    let outputs = vec![
        (files::METRICS.to_string(), io::format_records(&records)),
        (files::TABLE.to_string(), table),
        (files::BEST.to_string(), best),
    ];
    let files = write_all(&out_dir, &manifest, outputs)?;
    Ok(Outcome { out_dir, files, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyRecord {
    pub name: String,
    pub frobenius_error: f64,
    pub edge_f1: f64,
}

/// Exports adjacencies as CSV and PGM, with topology errors against the
/// original for the estimate and (given features) the graphical-lasso baseline.
pub fn cmd_heatmap(mut s: Settings) -> Result<Outcome> {
    let out_dir = s.out_dir();
    let original_path = require_path(&mut s, "original")?;
    let estimate_path = require_path(&mut s, "estimate")?;
    let features_path = s.path("features")?;
    let beta = features_path
        .is_some()
        .then(|| s.get_or("beta", eval::GLASSO_BETA))
        .transpose()?;
    let threshold: f64 = s.get_or("threshold", 0.5)?;
    let manifest = s.finish()?;

    let original = io::read_adjacency(&original_path)?;
    let estimate = io::read_adjacency(&estimate_path)?;
    let check = |name: &str, m: &anomedge_core::Matrix| {
        if m.shape() != original.shape() {
            return Err(CliError::new(
                Kind::Dimension,
                format!("{name} is {:?} but the original is {:?}", m.shape(), original.shape()),
            ));
        }
        Ok(())
    };
    check("estimate", &estimate)?;
    let mut maps = vec![("original", original.clone()), ("estimate", estimate)];
    if let (Some(p), Some(beta)) = (&features_path, beta) {
        let x = io::read_features(p)?;
        if x.n_rows() != original.nrows() {
            return Err(CliError::new(
                Kind::Dimension,
                format!("features have {} rows but the original has {} nodes", x.n_rows(), original.nrows()),
            ));
        }
        maps.push(("baseline", eval::glasso_adjacency(x.data(), beta)?));
    }

    let mut outputs = Vec::new();
    let mut records = String::new();
    let mut summary = Vec::new();
    for (name, m) in &maps {
        outputs.push((format!("{name}.csv"), io::format_matrix(m)));
        outputs.push((format!("{name}.pgm"), io::format_pgm(m)));
        if *name != "original" {
            check(name, m)?;
            let t = eval::topology_error(m, &original, threshold)?;
            let rec = TopologyRecord {
                name: name.to_string(),
                frobenius_error: t.frobenius_error,
                edge_f1: t.edge_f1,
            };
            records.push_str(&serde_json::to_string(&rec).expect("topology records serialize"));
            records.push('\n');
            summary.push(format!("{name}: frobenius_error={} edge_f1={}", t.frobenius_error, t.edge_f1));
        }
    }
    outputs.push((files::TOPOLOGY.into(), records));
    let files = write_all(&out_dir, &manifest, outputs)?;
    Ok(Outcome { out_dir, files, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_specs_round_trip() {
        for text in ["budget:10", "fraction:0.8", "absolute:12.5"] {
            assert_eq!(text.parse::<FloorSpec>().unwrap().to_string(), text);
        }
        assert!("budget".parse::<FloorSpec>().is_err());
        assert!("budget:-1".parse::<FloorSpec>().is_err());
        assert!("ratio:0.5".parse::<FloorSpec>().is_err());
    }

    #[test]
    fn solver_and_convention_names() {
        for name in ["als", "baseline", "recovery", "random"] {
            assert_eq!(name.parse::<SolverKind>().unwrap().to_string(), name);
        }
        assert!("svd".parse::<SolverKind>().is_err());
        assert_eq!("truth".parse::<Convention>().unwrap().0, MrrConvention::Truth);
        assert!("x".parse::<Convention>().is_err());
    }

    #[test]
    fn unknown_command_is_usage_error() {
        assert_eq!(run("frobnicate", Config::default()).unwrap_err().kind, Kind::Usage);
    }
}
