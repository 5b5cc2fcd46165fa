use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ingest::Regime;
use crate::search::{Algorithm, FrontierPolicy, SearchStatus};
use crate::store::CacheConfig;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 30] = [
    "pair",
    "from",
    "to",
    "from_id",
    "to_id",
    "expected_regime",
    "regime",
    "forward_reachable",
    "backward_reachable",
    "algorithm",
    "algorithm_kind",
    "frontier_policy",
    "delay_steps",
    "probe_only",
    "status",
    "length",
    "visited_forward",
    "visited_backward",
    "visited_total",
    "postponements",
    "probe_count",
    "steps",
    "meta_reads",
    "adjacency_reads",
    "cache_hits",
    "cache_misses",
    "visited_ratio",
    "mean_elapsed_us",
    "stddev_elapsed_us",
    "time_ratio",
];

/// Columns that vary between otherwise identical runs.
pub const TIMING_COLUMNS: [&str; 3] = ["mean_elapsed_us", "stddev_elapsed_us", "time_ratio"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub node_count: usize,
    pub edge_count: usize,
    /// `in_memory` or `on_disk`.
    pub condition: String,
    pub cache: Option<CacheConfig>,
    pub frontier_policies: Vec<String>,
    pub repetitions: u32,
    pub baseline: Option<String>,
    /// False when cells ran concurrently; timing fields are then empty.
    pub timing_valid: bool,
}

/// One (pair, algorithm) cell. Access counters are present only for on-disk
/// runs and describe the first repetition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub pair: String,
    pub from: String,
    pub to: String,
    pub from_id: u32,
    pub to_id: u32,
    pub expected_regime: Option<Regime>,
    pub regime: Regime,
    pub forward_reachable: usize,
    pub backward_reachable: usize,
    pub algorithm: String,
    pub algorithm_kind: Algorithm,
    pub frontier_policy: FrontierPolicy,
    pub delay_steps: u32,
    pub probe_only: bool,
    pub status: SearchStatus,
    pub length: usize,
    pub visited_forward: usize,
    pub visited_backward: usize,
    pub visited_total: usize,
    pub postponements: usize,
    pub probe_count: usize,
    pub steps: usize,
    pub meta_reads: Option<u64>,
    pub adjacency_reads: Option<u64>,
    pub cache_hits: Option<u64>,
    pub cache_misses: Option<u64>,
    /// Visited total over the baseline's on the same pair.
    pub visited_ratio: Option<f64>,
    pub mean_elapsed_us: Option<f64>,
    pub stddev_elapsed_us: Option<f64>,
    /// Mean elapsed over the baseline's on the same pair.
    pub time_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema_version: u32,
    pub scenario: String,
    pub environment: Environment,
    pub rows: Vec<ReportRow>,
}

impl ScenarioReport {
    pub fn row(&self, pair: &str, algorithm: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.pair == pair && r.algorithm == algorithm)
    }

    fn pair_labels(&self) -> Vec<&str> {
        let mut v: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !v.contains(&r.pair.as_str()) {
                v.push(&r.pair);
            }
        }
        v
    }

    fn algorithm_labels(&self) -> Vec<&str> {
        let mut v: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !v.contains(&r.algorithm.as_str()) {
                v.push(&r.algorithm);
            }
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format `{other}` (expected csv, json or markdown)")),
        }
    }
}

pub fn emit_report(report: &ScenarioReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => to_csv(report),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report types serialize");
            s.push('\n');
            s
        }
        ReportFormat::Markdown => to_markdown(report),
    }
}

fn algorithm_kind(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Unidirectional => "unidirectional",
        Algorithm::BidirBalanced => "bidir_balanced",
        Algorithm::BidirPostpone => "bidir_postpone",
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_default()
}

fn csv_record(r: &ReportRow) -> Vec<String> {
    vec![
        r.pair.clone(),
        r.from.clone(),
        r.to.clone(),
        r.from_id.to_string(),
        r.to_id.to_string(),
        opt(r.expected_regime),
        r.regime.to_string(),
        r.forward_reachable.to_string(),
        r.backward_reachable.to_string(),
        r.algorithm.clone(),
        algorithm_kind(r.algorithm_kind).to_string(),
        r.frontier_policy.as_str().to_string(),
        r.delay_steps.to_string(),
        r.probe_only.to_string(),
        r.status.as_str().to_string(),
        r.length.to_string(),
        r.visited_forward.to_string(),
        r.visited_backward.to_string(),
        r.visited_total.to_string(),
        r.postponements.to_string(),
        r.probe_count.to_string(),
        r.steps.to_string(),
        opt(r.meta_reads),
        opt(r.adjacency_reads),
        opt(r.cache_hits),
        opt(r.cache_misses),
        opt_f(r.visited_ratio, 6),
        opt_f(r.mean_elapsed_us, 3),
        opt_f(r.stddev_elapsed_us, 3),
        opt_f(r.time_ratio, 6),
    ]
}

fn to_csv(report: &ScenarioReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in &report.rows {
        w.write_record(csv_record(r)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
}

fn pivot(out: &mut String, report: &ScenarioReport, title: &str, cell: impl Fn(&ReportRow) -> String) {
    let algos = report.algorithm_labels();
    let _ = writeln!(out, "## {title}\n");
    let _ = writeln!(out, "| pair | {} |", algos.join(" | "));
    let _ = writeln!(out, "|---|{}", "---:|".repeat(algos.len()));
    for p in report.pair_labels() {
        let cells: Vec<String> =
            algos.iter().map(|a| report.row(p, a).map(&cell).unwrap_or_else(|| "-".into())).collect();
        let _ = writeln!(out, "| {p} | {} |", cells.join(" | "));
    }
    out.push('\n');
}

fn to_markdown(report: &ScenarioReport) -> String {
    let env = &report.environment;
    let mut out = String::new();
    let _ = writeln!(out, "# {}\n", report.scenario);
    let _ = writeln!(
        out,
        "{} nodes, {} edges, {}; frontier policy {}; {} repetitions{}.\n",
        env.node_count,
        env.edge_count,
        env.condition.replace('_', "-"),
        env.frontier_policies.join("/"),
        env.repetitions,
        if env.timing_valid { "" } else { " (parallel run, no timings)" }
    );
    if let Some(c) = &env.cache {
        let _ = writeln!(
            out,
            "Cache: {} nodes, {} us per miss, {:?}.\n",
            c.max_cached_nodes,
            c.latency_per_miss.as_micros(),
            c.mode
        );
    }

    let _ = writeln!(out, "## Reachable nodes\n");
    let _ = writeln!(out, "| pair | from | to | forward | backward | regime | expected |");
    let _ = writeln!(out, "|---|---|---|---:|---:|---|---|");
    for p in report.pair_labels() {
        let r = report.rows.iter().find(|r| r.pair == p).expect("label taken from rows");
        let _ = writeln!(
            out,
            "| {p} | {} | {} | {} | {} | {} | {} |",
            r.from,
            r.to,
            r.forward_reachable,
            r.backward_reachable,
            r.regime,
            r.expected_regime.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
        );
    }
    out.push('\n');

    pivot(&mut out, report, "Time to traverse (us)", |r| match (r.mean_elapsed_us, r.stddev_elapsed_us) {
        (Some(m), Some(s)) => format!("{m:.1} ± {s:.1}"),
        _ => "n/a".into(),
    });
    pivot(&mut out, report, "Visited nodes", |r| match r.visited_ratio {
        Some(x) => format!("{} ({x:.2})", r.visited_total),
        None => r.visited_total.to_string(),
    });
    pivot(&mut out, report, "Visited nodes, forward search", |r| r.visited_forward.to_string());
    pivot(&mut out, report, "Visited nodes, backward search", |r| r.visited_backward.to_string());
    out
}
