//! Argument parsing: maps flags onto configuration keys.

use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::config::{Config, OUT_DIR_ENV};
use crate::error::{CliError, Kind, Result};

const GENERATE: &[(&str, &str)] = &[
    ("seed", "master seed"),
    ("communities", "number of communities C"),
    ("n_features", "spectral features per node F"),
    ("nodes", "number of nodes N"),
    ("p_in", "within-community edge probability"),
    ("p_out", "between-community edge probability"),
    ("anomalies", "number of injected edges k"),
];

const PERTURB: &[(&str, &str)] = &[
    ("seed", "master seed"),
    ("graph", "input edge list"),
    ("features", "input feature CSV"),
    ("anomalies", "number of injected edges k"),
];

const SOLVER_PARAMS: &[(&str, &str)] = &[
    ("rank", "rank bound R of the low-rank part (als, baseline)"),
    ("lambda", "sparsity weight"),
    ("mu", "low-rank weight"),
    ("gamma", "feature smoothness weight (als)"),
    ("alpha", "likelihood weight (recovery)"),
    ("beta", "precision sparsity weight (recovery)"),
    ("kappa", "coupling weight (recovery)"),
    ("rho", "ADMM penalty (recovery)"),
    ("trace_floor", "budget:K, fraction:F or absolute:M (recovery)"),
    ("mrr_convention", "hits or truth"),
    ("timing", "record wall time (true/false)"),
];

const DETECT: &[(&str, &str)] = &[
    ("seed", "solver seed"),
    ("graph", "perturbed edge list"),
    ("features", "feature CSV"),
    ("truth", "truth edge list; enables metrics"),
    ("solver", "als, baseline, recovery or random"),
    ("max_iters", "iteration cap"),
    ("rel_tol", "relative objective tolerance (als, baseline)"),
    ("res_tol", "residual tolerance (recovery)"),
];

const SWEEP: &[(&str, &str)] = &[
    ("seed", "master seed"),
    ("trials", "scenarios per grid point"),
    ("family", "sbm or attributed"),
    ("graph", "edge list (attributed family)"),
    ("features", "feature CSV (attributed family)"),
    ("communities", "number of communities C (sbm)"),
    ("n_features", "spectral features per node F (sbm)"),
    ("nodes", "number of nodes N (sbm)"),
    ("p_in", "within-community edge probability (sbm)"),
    ("p_out", "between-community edge probability (sbm)"),
    ("anomalies", "injected edges per scenario"),
    ("solver", "comma-separated solvers"),
];

const HEATMAP: &[(&str, &str)] = &[
    ("original", "reference adjacency (edge list or CSV)"),
    ("estimate", "estimated adjacency (edge list or CSV)"),
    ("features", "feature CSV; adds the graphical-lasso baseline"),
    ("beta", "graphical-lasso sparsity weight"),
    ("threshold", "edge threshold for F1"),
];

fn keys(command: &str) -> Vec<(&'static str, &'static str)> {
    match command {
        "generate" => GENERATE.to_vec(),
        "perturb" => PERTURB.to_vec(),
        "detect" => [DETECT, SOLVER_PARAMS].concat(),
        "sweep" => [SWEEP, SOLVER_PARAMS].concat(),
        "heatmap" => HEATMAP.to_vec(),
        _ => Vec::new(),
    }
}

fn flag(key: &str) -> String {
    key.replace('_', "-")
}

fn about(command: &str) -> &'static str {
    match command {
        "generate" => "Sample an SBM scenario with spectral features and injected anomalous edges",
        "perturb" => "Inject anomalous edges into a user-supplied attributed graph",
        "detect" => "Rank candidate anomalous edges with one solver",
        "sweep" => "Grid search over solver parameters, averaged over trials",
        "heatmap" => "Export adjacencies as CSV and PGM with topology errors",
        _ => "",
    }
}

pub fn command() -> Command {
    let mut root = Command::new("anomedge")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Anomalous edge identification in attributed graphs")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for name in crate::commands::COMMANDS {
        let mut sub = Command::new(name)
            .about(about(name))
            .arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .help("key = value config file, e.g. a previous manifest.txt"),
            )
            .arg(
                Arg::new("out")
                    .long("out")
                    .value_name("DIR")
                    .help(format!("output directory [default: ${OUT_DIR_ENV} or ./anomedge-out]")),
            )
            .arg(
                Arg::new("set")
                    .long("set")
                    .value_name("KEY=VALUE")
                    .action(ArgAction::Append)
                    .help("set any key, e.g. --set als.lambda=0.05,0.1"),
            );
        for (key, help) in keys(name) {
            sub = sub.arg(Arg::new(key).long(flag(key)).value_name("VALUE").help(help));
        }
        root = root.subcommand(sub);
    }
    root
}

/// Merges the config file and the flags of a parsed subcommand.
pub fn resolve(name: &str, m: &ArgMatches) -> Result<Config> {
    let mut config = match m.get_one::<String>("config") {
        Some(p) => Config::load(Path::new(p))?,
        None => Config::default(),
    };
    for kv in m.get_many::<String>("set").into_iter().flatten() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::new(Kind::Usage, format!("--set expects KEY=VALUE, got `{kv}`")))?;
        config.set(k.trim(), v.trim());
    }
    for (key, _) in keys(name).into_iter().chain([("out", "")]) {
        if m.value_source(key) == Some(ValueSource::CommandLine) {
            if let Some(v) = m.get_one::<String>(key) {
                config.set(key, v.as_str());
            }
        }
    }
    Ok(config)
}

/// What `main` should do after parsing.
pub enum Parsed {
    Run { command: String, config: Config },
    /// Help or version text, printed to stdout with exit code 0.
    Display(String),
}

pub fn parse<I, T>(args: I) -> Result<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind as E;
            if matches!(
                e.kind(),
                E::DisplayHelp | E::DisplayVersion | E::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                return Ok(Parsed::Display(e.render().to_string()));
            }
            let text = e.render().to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            return Err(CliError::new(Kind::Usage, first.to_string()));
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    Ok(Parsed::Run {
        command: name.to_string(),
        config: resolve(name, sub)?,
    })
}

/// Parses and runs, returning the lines for stdout.
pub fn main_with_args<I, T>(args: I) -> Result<Vec<String>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse(args)? {
        Parsed::Display(text) => Ok(vec![text.trim_end().to_string()]),
        Parsed::Run { command, config } => {
            let outcome = crate::commands::run(&command, config)?;
            let mut lines = outcome.summary;
            lines.push(format!("wrote {} files to {}", outcome.files.len(), outcome.out_dir.display()));
            Ok(lines)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_parse(args: &[&str]) -> Result<Parsed> {
        parse(std::iter::once("anomedge").chain(args.iter().copied()))
    }

    #[test]
    fn flags_override_config_and_set() {
        let dir = std::env::temp_dir().join(format!("anomedge-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("c.txt");
        std::fs::write(&cfg, "seed = 1\nnodes = 40\np_in = 0.5\n").unwrap();
        let Parsed::Run { command, config } = run_parse(&[
            "generate",
            "--config",
            cfg.to_str().unwrap(),
            "--set",
            "nodes=50",
            "--seed",
            "9",
            "--p-out",
            "0.1",
        ])
        .unwrap() else {
            panic!("expected a run");
        };
        assert_eq!(command, "generate");
        assert_eq!(config.get("seed"), Some("9"));
        assert_eq!(config.get("nodes"), Some("50"));
        assert_eq!(config.get("p_in"), Some("0.5"));
        assert_eq!(config.get("p_out"), Some("0.1"));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn usage_errors_are_one_line() {
        for args in [&["detect", "--bogus", "1"][..], &["nope"][..], &["detect", "--set", "novalue"][..]] {
            let Err(e) = run_parse(args) else { panic!("expected an error") };
            assert_eq!(e.kind, Kind::Usage);
            assert_eq!(e.line().lines().count(), 1);
        }
        assert!(matches!(run_parse(&["--help"]).unwrap(), Parsed::Display(_)));
    }
}
