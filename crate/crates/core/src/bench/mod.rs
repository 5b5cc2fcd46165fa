//! Scenario harness: endpoint pairs × algorithm variants × one storage
//! condition, each cell repeated and checked for count determinism.
//!
//! Timing is a monotonic clock around the search call only. Graph loading,
//! store building and store opening are excluded.

mod pairs;
mod report;
mod scenario;

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{CallGraph, GraphError, InMemoryGraph, NodeId};
use crate::ingest::{classify_pair, generate_synthetic, import_jsonl, IngestError, PairProfile, Regime, SpecError};
use crate::search::{search, SearchConfig, SearchError, SearchResult};
use crate::store::{build_store, AccessStats, CacheConfig, DiskGraph, StoreError};

pub use pairs::{find_regime_pairs, sample_regime_pairs};
pub use report::{
    emit_report, Environment, ReportFormat, ReportRow, ScenarioReport, CSV_COLUMNS, REPORT_SCHEMA_VERSION,
    TIMING_COLUMNS,
};
pub use scenario::{
    load_scenario, AlgorithmSpec, Condition, Endpoint, GraphSource, PairSampling, PairSpec, Scenario,
    SCENARIO_SCHEMA_VERSION,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("pair `{pair}`: cannot resolve `{endpoint}`: {source}")]
    Unresolved { pair: String, endpoint: String, source: GraphError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Ingest { path: PathBuf, source: IngestError },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("pair `{pair}`, algorithm `{algorithm}`: {source}")]
    Search { pair: String, algorithm: String, source: SearchError },
    #[error("pair `{pair}`, algorithm `{algorithm}`: repetition {repetition} diverged from repetition 1")]
    NonDeterministic { pair: String, algorithm: String, repetition: u32 },
    #[error("report serialization failed: {0}")]
    Serialize(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Run cells on the rayon pool. Counts stay exact; timing columns are
    /// left empty because concurrent cells perturb each other.
    pub parallel: bool,
}

/// A scenario pair after names are resolved and samples drawn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedPair {
    pub label: String,
    pub initial: NodeId,
    pub target: NodeId,
    pub expected: Option<Regime>,
}

pub fn load_graph(source: &GraphSource) -> Result<InMemoryGraph, BenchError> {
    match source {
        GraphSource::Jsonl(path) => {
            let file = File::open(path).map_err(|source| BenchError::Io { path: path.clone(), source })?;
            import_jsonl(BufReader::new(file)).map_err(|source| BenchError::Ingest { path: path.clone(), source })
        }
        GraphSource::Synthetic(spec) => Ok(generate_synthetic(spec)?.graph),
        GraphSource::Store(path) => {
            let disk = DiskGraph::open(path, CacheConfig::default())?;
            Ok(InMemoryGraph::from_graph(&disk)?)
        }
    }
}

pub fn resolve_pairs<G: CallGraph + ?Sized>(graph: &G, specs: &[PairSpec]) -> Result<Vec<ResolvedPair>, BenchError> {
    let mut out = Vec::new();
    for spec in specs {
        match spec {
            PairSpec::Explicit { label, from, to, regime } => {
                let label = label.clone().unwrap_or_else(|| format!("{}->{}", endpoint_text(from), endpoint_text(to)));
                let initial = resolve_endpoint(graph, &label, from)?;
                let target = resolve_endpoint(graph, &label, to)?;
                out.push(ResolvedPair { label, initial, target, expected: *regime });
            }
            PairSpec::Sampled { label, sample } => {
                let base = label.clone().unwrap_or_else(|| sample.regime.to_string());
                for (i, (initial, target)) in sample_regime_pairs(graph, sample)?.into_iter().enumerate() {
                    out.push(ResolvedPair {
                        label: format!("{base}#{}", i + 1),
                        initial,
                        target,
                        expected: Some(sample.regime),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn endpoint_text(e: &Endpoint) -> String {
    match e {
        Endpoint::Id(id) => id.to_string(),
        Endpoint::Name(name) => name.clone(),
    }
}

fn resolve_endpoint<G: CallGraph + ?Sized>(graph: &G, pair: &str, e: &Endpoint) -> Result<NodeId, BenchError> {
    let unresolved = |source| BenchError::Unresolved { pair: pair.to_string(), endpoint: endpoint_text(e), source };
    match e {
        Endpoint::Id(id) => {
            let id = NodeId(*id);
            graph.check_node(id).map_err(unresolved)?;
            Ok(id)
        }
        Endpoint::Name(name) => graph.resolve_name(name).map_err(unresolved),
    }
}

pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport, BenchError> {
    run_scenario_with(scenario, RunOptions::default())
}

pub fn run_scenario_with(scenario: &Scenario, options: RunOptions) -> Result<ScenarioReport, BenchError> {
    scenario.validate()?;
    let graph = load_graph(&scenario.graph)?;
    let pairs = resolve_pairs(&graph, &scenario.pairs)?;
    let mut profiles = Vec::with_capacity(pairs.len());
    for p in &pairs {
        profiles.push(classify_pair(&graph, p.initial, p.target)?);
    }

    // Keeps a generated store alive for the duration of the run.
    let mut _scratch = None;
    let disk = match &scenario.condition {
        Condition::InMemory => None,
        Condition::OnDisk(cache) => {
            let path = match &scenario.graph {
                GraphSource::Store(path) => path.clone(),
                _ => {
                    let dir =
                        tempfile::tempdir().map_err(|source| BenchError::Io { path: std::env::temp_dir(), source })?;
                    let path = dir.path().join("scenario.cgs");
                    build_store(&graph, &path)?;
                    _scratch = Some(dir);
                    path
                }
            };
            Some((path, cache.clone()))
        }
    };

    let cells: Vec<(usize, usize)> =
        (0..pairs.len()).flat_map(|p| (0..scenario.algorithms.len()).map(move |a| (p, a))).collect();

    let run_cell = |&(p, a): &(usize, usize), shared: Option<&DiskGraph>| -> Result<CellOutcome, BenchError> {
        let pair = &pairs[p];
        let spec = &scenario.algorithms[a];
        let config = scenario.effective_config(spec);
        match (&disk, shared) {
            (None, _) => run_cell_on(&graph, None, pair, spec, &config, scenario.repetitions),
            (Some(_), Some(handle)) => run_cell_on(handle, Some(handle), pair, spec, &config, scenario.repetitions),
            (Some((path, cache)), None) => {
                let handle = DiskGraph::open(path, cache.clone())?;
                run_cell_on(&handle, Some(&handle), pair, spec, &config, scenario.repetitions)
            }
        }
    };

    let outcomes: Vec<CellOutcome> = if options.parallel {
        cells.par_iter().map(|c| run_cell(c, None)).collect::<Result<_, _>>()?
    } else {
        let handle = match &disk {
            Some((path, cache)) => Some(DiskGraph::open(path, cache.clone())?),
            None => None,
        };
        cells.iter().map(|c| run_cell(c, handle.as_ref())).collect::<Result<_, _>>()?
    };

    let mut rows: Vec<ReportRow> = cells
        .iter()
        .zip(outcomes)
        .map(|(&(p, a), outcome)| {
            let config = scenario.effective_config(&scenario.algorithms[a]);
            make_row(
                &graph,
                &pairs[p],
                &profiles[p],
                &scenario.algorithms[a].label,
                &config,
                outcome,
                !options.parallel,
            )
        })
        .collect::<Result<_, _>>()?;

    if let Some(base) = &scenario.baseline {
        apply_baseline(&mut rows, base);
    }

    let mut policies: Vec<String> = Vec::new();
    for a in &scenario.algorithms {
        let name = scenario.effective_config(a).frontier_policy.as_str().to_string();
        if !policies.contains(&name) {
            policies.push(name);
        }
    }

    Ok(ScenarioReport {
        schema_version: REPORT_SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        environment: Environment {
            node_count: graph.node_count(),
            edge_count: graph.edge_count(),
            condition: match &scenario.condition {
                Condition::InMemory => "in_memory".to_string(),
                Condition::OnDisk(_) => "on_disk".to_string(),
            },
            cache: match &scenario.condition {
                Condition::InMemory => None,
                Condition::OnDisk(c) => Some(c.clone()),
            },
            frontier_policies: policies,
            repetitions: scenario.repetitions,
            baseline: scenario.baseline.clone(),
            timing_valid: !options.parallel,
        },
        rows,
    })
}

struct CellOutcome {
    result: SearchResult,
    stats: Option<AccessStats>,
    elapsed: Vec<Duration>,
}

fn run_cell_on<G: CallGraph + ?Sized>(
    graph: &G,
    disk: Option<&DiskGraph>,
    pair: &ResolvedPair,
    spec: &AlgorithmSpec,
    config: &SearchConfig,
    repetitions: u32,
) -> Result<CellOutcome, BenchError> {
    let mut first: Option<(SearchResult, Option<AccessStats>)> = None;
    let mut elapsed = Vec::with_capacity(repetitions as usize);
    for rep in 1..=repetitions {
        if let Some(d) = disk {
            d.reset_stats();
        }
        let started = Instant::now();
        let result = search(graph, pair.initial, pair.target, config).map_err(|source| BenchError::Search {
            pair: pair.label.clone(),
            algorithm: spec.label.clone(),
            source,
        })?;
        elapsed.push(started.elapsed());
        let result = result.without_timing();
        match &first {
            None => first = Some((result, disk.map(DiskGraph::access_stats))),
            Some((r, _)) if *r != result => {
                return Err(BenchError::NonDeterministic {
                    pair: pair.label.clone(),
                    algorithm: spec.label.clone(),
                    repetition: rep,
                })
            }
            Some(_) => {}
        }
    }
    let (result, stats) = first.expect("repetitions >= 1");
    Ok(CellOutcome { result, stats, elapsed })
}

fn micros(d: Duration) -> f64 {
    d.as_secs_f64() * 1e6
}

/// Mean and sample standard deviation (zero for a single sample).
pub fn mean_and_stddev(samples: &[f64]) -> (f64, f64) {
    if samples.is_empty() {
        return (0.0, 0.0);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn make_row(
    graph: &InMemoryGraph,
    pair: &ResolvedPair,
    profile: &PairProfile,
    label: &str,
    config: &SearchConfig,
    outcome: CellOutcome,
    timing_valid: bool,
) -> Result<ReportRow, BenchError> {
    let r = &outcome.result;
    let (mean, sd) = mean_and_stddev(&outcome.elapsed.iter().map(|d| micros(*d)).collect::<Vec<_>>());
    Ok(ReportRow {
        pair: pair.label.clone(),
        from: graph.method_meta(pair.initial)?.qualified_name(),
        to: graph.method_meta(pair.target)?.qualified_name(),
        from_id: pair.initial.0,
        to_id: pair.target.0,
        expected_regime: pair.expected,
        regime: profile.regime,
        forward_reachable: profile.forward_count,
        backward_reachable: profile.backward_count,
        algorithm: label.to_string(),
        algorithm_kind: config.algorithm,
        frontier_policy: config.frontier_policy,
        delay_steps: if config.postpones() { config.delay_steps } else { 0 },
        probe_only: config.probe_only,
        status: r.status,
        length: r.length,
        visited_forward: r.visited_forward,
        visited_backward: r.visited_backward,
        visited_total: r.visited_total(),
        postponements: r.postponements,
        probe_count: r.probe_count,
        steps: r.steps,
        meta_reads: outcome.stats.map(|s| s.meta_reads),
        adjacency_reads: outcome.stats.map(|s| s.adjacency_reads),
        cache_hits: outcome.stats.map(|s| s.cache_hits),
        cache_misses: outcome.stats.map(|s| s.cache_misses),
        mean_elapsed_us: timing_valid.then_some(mean),
        stddev_elapsed_us: timing_valid.then_some(sd),
        visited_ratio: None,
        time_ratio: None,
    })
}

fn apply_baseline(rows: &mut [ReportRow], baseline: &str) {
    let bases: Vec<(String, usize, Option<f64>)> = rows
        .iter()
        .filter(|r| r.algorithm == baseline)
        .map(|r| (r.pair.clone(), r.visited_total, r.mean_elapsed_us))
        .collect();
    for row in rows.iter_mut() {
        let Some((_, visited, time)) = bases.iter().find(|b| b.0 == row.pair) else { continue };
        if *visited > 0 {
            row.visited_ratio = Some(row.visited_total as f64 / *visited as f64);
        }
        if let (Some(t), Some(base)) = (row.mean_elapsed_us, time) {
            if *base > 0.0 {
                row.time_ratio = Some(t / base);
            }
        }
    }
}
