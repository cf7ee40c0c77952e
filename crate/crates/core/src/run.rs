//! One experiment: a tree, a sequence, an algorithm, and a JSON report.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{GstError, ParseError};
use crate::gen::{gen_seq_with_reference, gen_tree, SeqKind, TreeShape};
use crate::interleave::interleave_bound;
use crate::loglog_factor;
use crate::machine::{format_trace, GstMachine, TraceMode};
use crate::oracle::exact_opt;
use crate::search_tree::SearchTree;
use crate::steiner::reference_tree;
use crate::tango::{TangoOptions, TangoTree};
use crate::topology::{Topology, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Tango,
    Static,
    Opt,
}

impl std::str::FromStr for Algorithm {
    type Err = GstError;
    fn from_str(s: &str) -> Result<Self, GstError> {
        match s {
            "tango" => Ok(Algorithm::Tango),
            "static" => Ok(Algorithm::Static),
            "opt" => Ok(Algorithm::Opt),
            _ => Err(GstError::UnknownName {
                kind: "algorithm",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub enum TreeSource {
    File(PathBuf),
    Generate { shape: TreeShape, n: usize, seed: u64 },
    Given(Topology),
}

#[derive(Clone, Debug)]
pub enum SeqSource {
    File(PathBuf),
    Generate { kind: SeqKind, m: usize, seed: u64 },
    Given(Vec<VertexId>),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub tree: TreeSource,
    pub seq: SeqSource,
    pub algorithm: Algorithm,
    pub report: Option<PathBuf>,
    /// Where to write the machine trace (tango and static only).
    pub trace: Option<PathBuf>,
    pub debug_audit: bool,
}

impl RunConfig {
    pub fn new(tree: TreeSource, seq: SeqSource, algorithm: Algorithm) -> Self {
        RunConfig {
            tree,
            seq,
            algorithm,
            report: None,
            trace: None,
            debug_audit: false,
        }
    }
}

/// Raw measurements of one run. Ratios are derived on demand and in
/// [`to_json`](RunReport::to_json), never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub n: usize,
    pub m: usize,
    pub algorithm: Algorithm,
    pub per_search_cost: Vec<u64>,
    pub interleave: u64,
    pub first_definitions: u64,
    pub lower_bound: i64,
    /// Total preferred-path changes (tango only).
    pub path_changes: Option<u64>,
    /// Largest per-search `cost / ((changes + 1) * L)` (tango only).
    pub worst_search_ratio: Option<f64>,
    /// Whether every search passed the structural audit, when audited.
    pub audit: Option<bool>,
    pub wall_ms: f64,
    pub trace: Option<String>,
    pub initial_tree: Option<SearchTree>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PerSearchSummary {
    pub mean: f64,
    pub max: u64,
}

/// The JSON shape of a report.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ReportJson {
    pub schema: u32,
    pub n: usize,
    pub m: usize,
    pub algorithm: Algorithm,
    pub total_cost: u64,
    pub per_search: PerSearchSummary,
    #[serde(rename = "I")]
    pub interleave: u64,
    pub first_definitions: u64,
    pub lower_bound: i64,
    pub loglog_factor: u64,
    pub path_changes: Option<u64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    #[serde(rename = "C_worst")]
    pub c_worst: Option<f64>,
    #[serde(rename = "C_prime")]
    pub c_prime: f64,
    pub audit: Option<bool>,
    pub wall_ms: f64,
}

impl RunReport {
    pub fn total_cost(&self) -> u64 {
        self.per_search_cost.iter().sum()
    }

    pub fn loglog(&self) -> u64 {
        loglog_factor(self.n)
    }

    /// `total / ((path_changes + m) * L)`: the per-search constant, amortised.
    pub fn c(&self) -> Option<f64> {
        self.path_changes
            .map(|pc| self.total_cost() as f64 / ((pc + self.m as u64).max(1) * self.loglog()) as f64)
    }

    /// `total / ((I + n + m) * L)`.
    pub fn c_prime(&self) -> f64 {
        let denom = (self.interleave + self.n as u64 + self.m as u64) * self.loglog();
        self.total_cost() as f64 / denom as f64
    }

    pub fn summary(&self) -> ReportJson {
        let max = self.per_search_cost.iter().copied().max().unwrap_or(0);
        let mean = if self.m == 0 {
            0.0
        } else {
            self.total_cost() as f64 / self.m as f64
        };
        ReportJson {
            schema: 1,
            n: self.n,
            m: self.m,
            algorithm: self.algorithm,
            total_cost: self.total_cost(),
            per_search: PerSearchSummary { mean, max },
            interleave: self.interleave,
            first_definitions: self.first_definitions,
            lower_bound: self.lower_bound,
            loglog_factor: self.loglog(),
            path_changes: self.path_changes,
            c: self.c(),
            c_worst: self.worst_search_ratio,
            c_prime: self.c_prime(),
            audit: self.audit,
            wall_ms: self.wall_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary()).expect("report serialises")
    }
}

/// Whitespace-separated decimal vertex ids.
pub fn parse_sequence(text: &str) -> Result<Vec<VertexId>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            let v = tok.parse::<u32>().map_err(|_| ParseError::BadLine {
                line: i + 1,
                content: tok.to_string(),
            })?;
            out.push(VertexId(v));
        }
    }
    Ok(out)
}

pub fn format_sequence(x: &[VertexId]) -> String {
    let mut s: String = x.iter().map(|v| v.0.to_string()).collect::<Vec<_>>().join(" ");
    s.push('\n');
    s
}

fn read(path: &PathBuf) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|e| RunError::Io(path.display().to_string(), e.to_string()))
}

fn write(path: &PathBuf, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|e| RunError::Io(path.display().to_string(), e.to_string()))
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Gst(#[from] GstError),
    #[error("{0}: {1}")]
    Io(String, String),
}

impl From<ParseError> for RunError {
    fn from(e: ParseError) -> Self {
        RunError::Gst(e.into())
    }
}

impl From<crate::error::MachineError> for RunError {
    fn from(e: crate::error::MachineError) -> Self {
        RunError::Gst(e.into())
    }
}

pub fn load_tree(src: &TreeSource) -> Result<Topology, RunError> {
    Ok(match src {
        TreeSource::File(p) => Topology::parse(&read(p)?)?,
        TreeSource::Generate { shape, n, seed } => gen_tree(*shape, *n, *seed)?,
        TreeSource::Given(g) => g.clone(),
    })
}

pub fn load_sequence(src: &SeqSource, g: &Topology, p: &SearchTree) -> Result<Vec<VertexId>, RunError> {
    let x = match src {
        SeqSource::File(path) => parse_sequence(&read(path)?)?,
        SeqSource::Generate { kind, m, seed } => gen_seq_with_reference(*kind, g, p, *m, *seed),
        SeqSource::Given(x) => x.clone(),
    };
    if let Some(&bad) = x.iter().find(|v| !g.contains(**v)) {
        return Err(GstError::UnknownVertex(bad).into());
    }
    Ok(x)
}

/// Runs a configuration, writing the report and trace files it names.
pub fn run(config: &RunConfig) -> Result<RunReport, RunError> {
    let g = load_tree(&config.tree)?;
    let p = reference_tree(&g);
    let x = load_sequence(&config.seq, &g, &p)?;
    let want_trace = config.trace.is_some();
    let report = run_on(&g, &p, &x, config.algorithm, config.debug_audit, want_trace)?;
    if let (Some(path), Some(trace)) = (&config.trace, &report.trace) {
        write(path, trace)?;
    }
    if let Some(path) = &config.report {
        write(path, &report.to_json())?;
    }
    Ok(report)
}

/// Runs `algorithm` on `(g, x)` with reference tree `p` (which must be the
/// reference tree tango builds for `g` for the numbers to be comparable).
pub fn run_on(
    g: &Topology,
    p: &SearchTree,
    x: &[VertexId],
    algorithm: Algorithm,
    debug_audit: bool,
    keep_trace: bool,
) -> Result<RunReport, RunError> {
    let clock = Instant::now();
    let mode = if keep_trace {
        TraceMode::Full
    } else {
        TraceMode::CountOnly
    };
    let lb = interleave_bound(g, p, x)?;
    let mut report = RunReport {
        n: g.n(),
        m: x.len(),
        algorithm,
        per_search_cost: Vec::with_capacity(x.len()),
        interleave: lb.total,
        first_definitions: lb.first_definitions,
        lower_bound: lb.lower_bound,
        path_changes: None,
        worst_search_ratio: None,
        audit: None,
        wall_ms: 0.0,
        trace: None,
        initial_tree: None,
    };
    match algorithm {
        Algorithm::Tango => {
            let opts = TangoOptions {
                trace: mode,
                debug_audit: false,
            };
            let mut t = TangoTree::with_reference(g.clone(), p.clone(), opts)?;
            let l = loglog_factor(g.n()) as f64;
            let mut worst = 0.0f64;
            let mut audit_ok = true;
            for &v in x {
                let s = t.search(v)?;
                worst = worst.max(s.cost as f64 / ((s.path_changes + 1) as f64 * l));
                report.per_search_cost.push(s.cost);
                if debug_audit && audit_ok {
                    audit_ok = t.audit().is_ok();
                }
            }
            report.path_changes = Some(t.total_path_changes());
            report.worst_search_ratio = Some(worst);
            report.audit = debug_audit.then_some(audit_ok);
            if keep_trace {
                report.trace = Some(format_trace(t.machine().trace()));
            }
            report.initial_tree = Some(t.initial_tree().clone());
        }
        Algorithm::Static => {
            let mut m = GstMachine::new(g.clone(), p.clone())?.with_trace_mode(mode);
            for &v in x {
                report.per_search_cost.push(m.static_search(v)?);
            }
            if keep_trace {
                report.trace = Some(format_trace(m.trace()));
            }
            report.initial_tree = Some(p.clone());
        }
        Algorithm::Opt => {
            // Only the total is defined for the offline optimum.
            let total = exact_opt(g, x)?;
            report.per_search_cost = vec![0; x.len()];
            if let Some(last) = report.per_search_cost.last_mut() {
                *last = total;
            }
        }
    }
    report.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}
