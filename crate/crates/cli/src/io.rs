//! On-disk formats.
//!
//! * edge lists: `# nodes=N` header, then `i<TAB>j<TAB>weight` per edge,
//!   0-based ids, `i < j`;
//! * truth lists: `i<TAB>j` per anomalous edge, no header;
//! * matrices and features: headerless CSV, one row per node;
//! * candidates: `rank<TAB>i<TAB>j[<TAB>score]`, rank starting at 1;
//! * metrics: JSON lines, see [`MetricRecord`];
//! * images: plain (ASCII) PGM.
//!
//! Floats are written in Rust's shortest round-trip form, so every file
//! reloads to the exact values that produced it.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use anomedge_core::{EdgeSet, FeatureMatrix, GraphData, Matrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Kind, Result};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, raw: Option<&str>, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = raw.ok_or_else(|| CliError::parse(path, line, format!("missing {what}")))?;
    raw.parse()
        .map_err(|e| CliError::parse(path, line, format!("bad {what} `{raw}`: {e}")))
}

pub fn format_edge_list(g: &GraphData) -> String {
    let mut out = format!("# nodes={}\n", g.n_nodes());
    for (i, j, w) in g.edge_list() {
        let _ = writeln!(out, "{i}\t{j}\t{w}");
    }
    out
}

/// Parses an edge list. Without a `# nodes=N` header the node count is one
/// more than the largest id. A missing weight column means weight 1.
pub fn parse_edge_list(text: &str, path: &Path) -> Result<GraphData> {
    let mut declared = None;
    for (idx, line) in text.lines().enumerate() {
        if let Some(n) = line.trim().strip_prefix("# nodes=") {
            declared = Some(field::<usize>(path, idx + 1, Some(n.trim()), "node count")?);
            break;
        }
    }
    let mut edges = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (line, content) in data_lines(text) {
        let mut cols = content.split_whitespace();
        let i: usize = field(path, line, cols.next(), "source node")?;
        let j: usize = field(path, line, cols.next(), "target node")?;
        let w: f64 = match cols.next() {
            Some(raw) => field(path, line, Some(raw), "weight")?,
            None => 1.0,
        };
        if cols.next().is_some() {
            return Err(CliError::parse(path, line, "expected at most three columns"));
        }
        if i == j {
            return Err(CliError::parse(path, line, format!("self-loop at node {i}")));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(CliError::parse(path, line, format!("weight {w} must be finite and nonnegative")));
        }
        if let Some(n) = declared {
            if i.max(j) >= n {
                return Err(CliError::parse(path, line, format!("node {} out of range for nodes={n}", i.max(j))));
            }
        }
        if let Some(first) = seen.insert((i.min(j), i.max(j)), line) {
            return Err(CliError::parse(path, line, format!("duplicate of the edge on line {first}")));
        }
        edges.push((i, j, w));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0));
    Ok(GraphData::from_edges(n, edges)?)
}

pub fn read_edge_list(path: &Path) -> Result<GraphData> {
    parse_edge_list(&read_text(path)?, path)
}

pub fn write_edge_list(path: &Path, g: &GraphData) -> Result<()> {
    write_text(path, &format_edge_list(g))
}

pub fn format_truth(truth: &EdgeSet) -> String {
    let mut out = String::new();
    for (i, j) in truth.iter() {
        let _ = writeln!(out, "{i}\t{j}");
    }
    out
}

pub fn parse_truth(text: &str, path: &Path) -> Result<EdgeSet> {
    let mut truth = EdgeSet::new();
    for (line, content) in data_lines(text) {
        let mut cols = content.split_whitespace();
        let i: usize = field(path, line, cols.next(), "source node")?;
        let j: usize = field(path, line, cols.next(), "target node")?;
        let fresh = truth
            .insert(i, j)
            .map_err(|e| CliError::parse(path, line, e))?;
        if !fresh {
            return Err(CliError::parse(path, line, format!("duplicate truth edge ({i}, {j})")));
        }
    }
    Ok(truth)
}

pub fn read_truth(path: &Path) -> Result<EdgeSet> {
    parse_truth(&read_text(path)?, path)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        for (c, v) in row.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

/// Headerless numeric CSV; every row must have the same width.
pub fn parse_matrix(text: &str, path: &Path) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut n_cols = 0;
    let mut n_rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            CliError::parse(path, line, e)
        })?;
        let line = record.position().map_or(n_rows + 1, |p| p.line() as usize);
        if n_rows == 0 {
            n_cols = record.len();
        }
        for raw in record.iter() {
            let v: f64 = field(path, line, Some(raw), "number")?;
            if !v.is_finite() {
                return Err(CliError::parse(path, line, format!("non-finite value `{raw}`")));
            }
            values.push(v);
        }
        n_rows += 1;
    }
    if n_rows == 0 {
        return Err(CliError::parse(path, 1, "empty matrix"));
    }
    Ok(Matrix::from_row_slice(n_rows, n_cols, &values))
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    parse_matrix(&read_text(path)?, path)
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<()> {
    write_text(path, &format_matrix(m))
}

pub fn read_features(path: &Path) -> Result<FeatureMatrix> {
    Ok(FeatureMatrix::new(read_matrix(path)?)?)
}

/// Features must have one row per node.
pub fn check_feature_rows(features: &FeatureMatrix, g: &GraphData) -> Result<()> {
    if features.n_rows() != g.n_nodes() {
        return Err(CliError::new(
            Kind::Dimension,
            format!(
                "feature matrix has {} rows but the graph has {} nodes",
                features.n_rows(),
                g.n_nodes()
            ),
        ));
    }
    Ok(())
}

/// Adjacency from either an edge list (`.edges`, `.tsv`, `.txt`) or a CSV matrix.
pub fn read_adjacency(path: &Path) -> Result<Matrix> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if matches!(ext, "edges" | "tsv" | "txt") {
        Ok(read_edge_list(path)?.adjacency().clone())
    } else {
        read_matrix(path)
    }
}

pub fn format_candidates(ranking: &[(usize, usize)], scores: Option<&[f64]>) -> String {
    let mut out = String::new();
    for (r, &(i, j)) in ranking.iter().enumerate() {
        let _ = write!(out, "{}\t{i}\t{j}", r + 1);
        if let Some(s) = scores {
            let _ = write!(out, "\t{}", s[r]);
        }
        out.push('\n');
    }
    out
}

pub type Candidates = (Vec<(usize, usize)>, Option<Vec<f64>>);

/// Returns the ranked pairs and, when every line carries one, the scores.
pub fn parse_candidates(text: &str, path: &Path) -> Result<Candidates> {
    let mut ranking = Vec::new();
    let mut scores = Vec::new();
    for (line, content) in data_lines(text) {
        let mut cols = content.split('\t');
        let rank: usize = field(path, line, cols.next(), "rank")?;
        if rank != ranking.len() + 1 {
            return Err(CliError::parse(path, line, format!("expected rank {}", ranking.len() + 1)));
        }
        let i: usize = field(path, line, cols.next(), "source node")?;
        let j: usize = field(path, line, cols.next(), "target node")?;
        ranking.push((i, j));
        if let Some(raw) = cols.next() {
            scores.push(field(path, line, Some(raw), "score")?);
        }
    }
    let scores = (!ranking.is_empty() && scores.len() == ranking.len()).then_some(scores);
    Ok((ranking, scores))
}

/// One JSON line of metrics. Trial records carry `aggregate: false`; the
/// closing record of a run carries the means, `aggregate: true`, the master
/// seed, and the trial count with standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub solver: String,
    pub grid_point: usize,
    pub seed: u64,
    pub h_at_10: f64,
    pub mrr: f64,
    pub n_candidates: f64,
    pub runtime_seconds: f64,
    pub aggregate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_h_at_10: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_mrr: Option<f64>,
}

pub fn format_records(records: &[MetricRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("metric records serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_records(text: &str, path: &Path) -> Result<Vec<MetricRecord>> {
    data_lines(text)
        .map(|(line, content)| serde_json::from_str(content).map_err(|e| CliError::parse(path, line, e)))
        .collect()
}

/// Plain PGM, one pixel per entry, linear in the entry with the maximum
/// mapped to white. Negative entries and all-nonpositive matrices are black.
pub fn format_pgm(m: &Matrix) -> String {
    let max = m.iter().copied().fold(0.0_f64, f64::max);
    let mut out = format!("P2\n{} {}\n255\n", m.ncols(), m.nrows());
    for row in m.row_iter() {
        let line: Vec<String> = row
            .iter()
            .map(|&v| {
                let level = if max > 0.0 { (255.0 * v.max(0.0) / max).round() } else { 0.0 };
                (level as u8).to_string()
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Pixel rows of a plain PGM written by [`format_pgm`].
pub fn parse_pgm(text: &str, path: &Path) -> Result<Vec<Vec<u8>>> {
    let mut tokens = text.split_whitespace();
    if tokens.next() != Some("P2") {
        return Err(CliError::parse(path, 1, "not a plain PGM"));
    }
    let mut next = |what: &str| -> Result<usize> { field(path, 2, tokens.next(), what) };
    let (w, h, _max) = (next("width")?, next("height")?, next("max value")?);
    let mut rows = Vec::with_capacity(h);
    for r in 0..h {
        let mut row = Vec::with_capacity(w);
        for _ in 0..w {
            row.push(field::<u8>(path, r + 4, tokens.next(), "pixel")?);
        }
        rows.push(row);
    }
    Ok(rows)
}
