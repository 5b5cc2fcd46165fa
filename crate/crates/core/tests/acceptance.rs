//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use callpath::bench::{
    emit_report, load_scenario, run_scenario, sample_regime_pairs, AlgorithmSpec, Condition, GraphSource, PairSampling,
    PairSpec, ReportFormat, Scenario, TIMING_COLUMNS,
};
use callpath::graph::InMemoryGraph;
use callpath::ingest::{classify_pair, generate_synthetic, Regime, SyntheticSpec};
use callpath::search::{TraceAction, TraceEvent};
use callpath::{
    build_store, open_store, search, CacheConfig, CacheMode, CallGraph, ClassKind, Direction, FrontierPolicy, NodeId,
    SearchConfig, SearchResult, SearchStatus,
};
use common::{bfs_distances, pathology_fixture, random_kind, rng, validate_path, RawGraph};
use rand::Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

const POLICIES: [FrontierPolicy; 2] = [FrontierPolicy::LargerFirst, FrontierPolicy::SmallerFirst];

/// Frozen maxima of (length - shortest distance) for the balanced search on
/// the small-graph sweep, per frontier policy.
const BALANCED_GAP_BOUND: [(FrontierPolicy, usize); 2] =
    [(FrontierPolicy::LargerFirst, 0), (FrontierPolicy::SmallerFirst, 0)];

/// Nodes the three-round hold adds to the backward search on the pathology
/// fixture (5 branches of depth 3 expanded while the hub waits).
const PATHOLOGY_EXTRA_BACKWARD: usize = 15;

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "oracle correctness", c1_oracle_correctness),
        (2, "unidirectional optimality", c2_unidirectional_optimality),
        (3, "reduction identity", c3_reduction_identity),
        (4, "probe-only traversal equivalence", c4_probe_only_equivalence),
        (5, "P4 improvement", c5_p4_improvement),
        (6, "P3 pathology", c6_p3_pathology),
        (7, "backend invariance", c7_backend_invariance),
        (8, "probe overhead", c8_probe_overhead),
        (9, "delay accounting", c9_delay_accounting),
        (10, "determinism", c10_determinism),
        (11, "balanced optimality gap", c11_balanced_gap),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2} {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2} {name} ({secs:.2}s): {detail}");
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn hub_fixture() -> &'static InMemoryGraph {
    static G: OnceLock<InMemoryGraph> = OnceLock::new();
    G.get_or_init(|| generate_synthetic(&SyntheticSpec::hub_fixture()).unwrap().graph)
}

/// The pair the shipped hub-fixture scenario labels `P4#1`.
fn pinned_p4_sampling(budget: usize) -> PairSampling {
    PairSampling { regime: Regime::P4, budget, seed: 1, require_path: true, max_attempts: None }
}

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn with_policy(c: SearchConfig, p: FrontierPolicy) -> SearchConfig {
    c.with_policy(p)
}

// ---------------------------------------------------------------------------
// Criteria 1 and 11: small-graph sweep.

struct SweepSummary {
    instances: usize,
    queries: usize,
    failures: Vec<String>,
    /// (label, max gap)
    gaps: Vec<(String, usize)>,
}

fn sweep_configs() -> Vec<(String, SearchConfig)> {
    let mut v = vec![("U".to_string(), SearchConfig::unidirectional())];
    for p in POLICIES {
        for (label, c) in [
            ("A1", SearchConfig::a1()),
            ("A2", SearchConfig::a2()),
            ("A3", SearchConfig::a3()),
            ("A4", SearchConfig::a4()),
        ] {
            v.push((format!("{label}/{}", p.as_str()), with_policy(c, p)));
        }
    }
    v
}

fn sweep_instances() -> Vec<RawGraph> {
    let mut out = Vec::new();
    for n in 1..=4usize {
        for mask in 0..(1u64 << (n * n)) {
            let mut r = rng(((n as u64) << 32) | mask);
            let kinds = (0..n).map(|_| random_kind(&mut r, 0.5)).collect();
            out.push(RawGraph::from_mask(n, mask, kinds));
        }
    }
    let mut r = rng(6);
    let densities = [0.1, 0.15, 0.2, 0.3, 0.5];
    for k in 0..40_000 {
        let p = densities[k % densities.len()];
        let mut mask = 0u64;
        for bit in 0..36 {
            if r.gen_bool(p) {
                mask |= 1 << bit;
            }
        }
        let kinds = (0..6).map(|_| random_kind(&mut r, 0.5)).collect();
        out.push(RawGraph::from_mask(6, mask, kinds));
    }
    out
}

fn sweep() -> &'static SweepSummary {
    static S: OnceLock<SweepSummary> = OnceLock::new();
    S.get_or_init(|| {
        let configs = sweep_configs();
        let instances = sweep_instances();
        let per: Vec<(usize, Vec<String>, Vec<usize>)> = instances
            .par_iter()
            .map(|raw| {
                let g = raw.build();
                let m = raw.matrix();
                let mut queries = 0;
                let mut failures = Vec::new();
                let mut gaps = vec![0usize; configs.len()];
                for s in 0..raw.n {
                    let dist = bfs_distances(&m, s);
                    for t in 0..raw.n {
                        for (ci, (label, c)) in configs.iter().enumerate() {
                            queries += 1;
                            let r = search(&g, NodeId(s as u32), NodeId(t as u32), c).unwrap();
                            let reachable = dist[t].is_some();
                            if (r.status == SearchStatus::Found) != reachable {
                                failures.push(format!("{label} {s}->{t} status {:?} on {:?}", r.status, raw.edges));
                                continue;
                            }
                            if let Some(d) = dist[t] {
                                if let Err(e) = validate_path(&m, s, t, &r.path) {
                                    failures.push(format!("{label} {s}->{t}: {e} on {:?}", raw.edges));
                                    continue;
                                }
                                if r.length != r.path.len() || r.length < d {
                                    failures.push(format!("{label} {s}->{t} length {} vs {d}", r.length));
                                    continue;
                                }
                                gaps[ci] = gaps[ci].max(r.length - d);
                            }
                        }
                    }
                }
                failures.truncate(3);
                (queries, failures, gaps)
            })
            .collect();
        let mut summary = SweepSummary {
            instances: instances.len(),
            queries: 0,
            failures: Vec::new(),
            gaps: configs.iter().map(|(l, _)| (l.clone(), 0)).collect(),
        };
        for (q, f, g) in per {
            summary.queries += q;
            if summary.failures.len() < 5 {
                summary.failures.extend(f);
            }
            for (slot, v) in summary.gaps.iter_mut().zip(g) {
                slot.1 = slot.1.max(v);
            }
        }
        summary
    })
}

fn c1_oracle_correctness() -> Outcome {
    let s = sweep();
    ensure(s.instances >= 100_000, || format!("only {} instances", s.instances))?;
    ensure(s.failures.is_empty(), || s.failures.join("; "))?;
    Ok(format!("{} instances, {} queries over {} configurations, no mismatch", s.instances, s.queries, s.gaps.len()))
}

fn c11_balanced_gap() -> Outcome {
    let s = sweep();
    let all: Vec<String> = s.gaps.iter().map(|(l, g)| format!("{l}={g}")).collect();
    for (policy, bound) in BALANCED_GAP_BOUND {
        let label = format!("A4/{}", policy.as_str());
        let observed = s.gaps.iter().find(|(l, _)| *l == label).unwrap().1;
        ensure(observed == bound, || {
            format!("{label} max gap {observed}, frozen bound {bound}; all: {}", all.join(" "))
        })?;
    }
    Ok(format!("max(length - distance): {}", all.join(" ")))
}

// ---------------------------------------------------------------------------

fn c2_unidirectional_optimality() -> Outcome {
    let mut total = 0usize;
    let mut found = 0usize;
    for (seed, p) in [(21u64, 0.005), (22, 0.01), (23, 0.03)] {
        let raw = RawGraph::random(200, p, 0.3, &mut rng(seed));
        let g = raw.build();
        let m = raw.matrix();
        let results: Vec<Result<(usize, usize), String>> = (0..200)
            .into_par_iter()
            .map(|s| {
                let dist = bfs_distances(&m, s);
                let mut f = 0;
                for t in 0..200 {
                    let r = callpath::unidirectional_shortest_path(&g, NodeId(s as u32), NodeId(t as u32)).unwrap();
                    match dist[t] {
                        Some(d) => {
                            if r.status != SearchStatus::Found || r.length != d {
                                return Err(format!("seed {seed} {s}->{t}: {:?} length {} vs {d}", r.status, r.length));
                            }
                            validate_path(&m, s, t, &r.path)?;
                            f += 1;
                        }
                        None if r.status != SearchStatus::NoPath => {
                            return Err(format!("seed {seed} {s}->{t}: found a path to an unreachable node"))
                        }
                        None => {}
                    }
                }
                Ok((200, f))
            })
            .collect();
        for r in results {
            let (q, f) = r?;
            total += q;
            found += f;
        }
    }
    Ok(format!("{total} pairs on 3 graphs of 200 nodes, {found} reachable, all lengths equal BFS distance"))
}

fn random_instance(r: &mut rand_chacha::ChaCha8Rng, max_n: usize) -> RawGraph {
    let n = r.gen_range(2..=max_n);
    let p = r.gen_range(0.02..0.35);
    RawGraph::random(n, p, 0.4, r)
}

fn query_pairs(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<(NodeId, NodeId)> {
    if n <= 10 {
        (0..n as u32).flat_map(|s| (0..n as u32).map(move |t| (NodeId(s), NodeId(t)))).collect()
    } else {
        (0..25).map(|_| (NodeId(r.gen_range(0..n as u32)), NodeId(r.gen_range(0..n as u32)))).collect()
    }
}

fn c3_reduction_identity() -> Outcome {
    let mut r = rng(3);
    let mut queries = 0;
    for inst in 0..1000 {
        let raw = random_instance(&mut r, 40);
        let g = raw.build();
        for (s, t) in query_pairs(&mut r, raw.n) {
            for p in POLICIES {
                queries += 1;
                let reduced = SearchConfig { delay_steps: 0, probe_only: false, ..SearchConfig::a1() }.with_policy(p);
                let a = search(&g, s, t, &reduced).unwrap();
                let b = search(&g, s, t, &SearchConfig::a4().with_policy(p)).unwrap();
                let same = a.status == b.status
                    && a.path == b.path
                    && a.visited_forward == b.visited_forward
                    && a.visited_backward == b.visited_backward
                    && a.steps == b.steps;
                ensure(same, || format!("instance {inst} {s}->{t} ({}): {a:?} vs {b:?}", p.as_str()))?;
                ensure(a.probe_count == 0 && a.postponements == 0, || format!("instance {inst}: delay 0 probed"))?;
            }
        }
    }
    Ok(format!("1000 instances, {queries} queries, identical paths, visited counts and steps"))
}

fn expanded_set(r: &SearchResult) -> BTreeSet<(bool, NodeId)> {
    r.trace
        .iter()
        .filter(|e| e.action == TraceAction::Expanded)
        .map(|e| (e.direction == Direction::Forward, e.node))
        .collect()
}

fn c4_probe_only_equivalence() -> Outcome {
    let mut cases: Vec<(InMemoryGraph, Vec<(NodeId, NodeId)>)> = Vec::new();
    let mut r = rng(4);
    for _ in 0..1000 {
        let raw = random_instance(&mut r, 40);
        let pairs = query_pairs(&mut r, raw.n);
        cases.push((raw.build(), pairs));
    }
    let hub = hub_fixture().clone();
    let mut hub_pairs = sample_regime_pairs(&hub, &pinned_p4_sampling(10)).unwrap();
    hub_pairs.extend(
        sample_regime_pairs(
            &hub,
            &PairSampling { regime: Regime::P1, budget: 5, seed: 2, require_path: false, max_attempts: None },
        )
        .unwrap(),
    );
    cases.push((hub, hub_pairs));

    let (mut queries, mut probed) = (0, 0);
    for (ci, (g, pairs)) in cases.iter().enumerate() {
        for &(s, t) in pairs {
            for p in POLICIES {
                queries += 1;
                let a3 = search(g, s, t, &SearchConfig::a3().with_policy(p).with_trace()).unwrap();
                let a4 = search(g, s, t, &SearchConfig::a4().with_policy(p).with_trace()).unwrap();
                ensure(expanded_set(&a3) == expanded_set(&a4), || format!("case {ci} {s}->{t}: node sets differ"))?;
                ensure(a3.path == a4.path && a3.steps == a4.steps, || format!("case {ci} {s}->{t}: paths differ"))?;
                let backward_processed = a3.trace.iter().filter(|e| e.direction == Direction::Backward).count();
                ensure(a3.probe_count == backward_processed, || {
                    format!("case {ci} {s}->{t}: {} probes for {backward_processed} backward nodes", a3.probe_count)
                })?;
                ensure(backward_processed == 0 || a3.probe_count > 0, || format!("case {ci} {s}->{t}: no probe"))?;
                ensure(a3.postponements == 0, || format!("case {ci} {s}->{t}: probe-only run postponed"))?;
                if a3.probe_count > 0 {
                    probed += 1;
                }
            }
        }
    }
    Ok(format!("{queries} queries, identical expanded node sets, {probed} with probes"))
}

fn c5_p4_improvement() -> Outcome {
    let started = Instant::now();
    let g = generate_synthetic(&SyntheticSpec::hub_fixture()).unwrap().graph;
    let (s, t) =
        *sample_regime_pairs(&g, &pinned_p4_sampling(1)).unwrap().first().ok_or("no P4 pair on the hub fixture")?;
    let profile = classify_pair(&g, s, t).unwrap();
    ensure(profile.regime == Regime::P4, || format!("{profile:?}"))?;
    let a1 = search(&g, s, t, &SearchConfig::a1()).unwrap();
    let a4 = search(&g, s, t, &SearchConfig::a4()).unwrap();
    let elapsed = started.elapsed();

    // Context over the wider sample; informational only.
    let sample = sample_regime_pairs(&g, &pinned_p4_sampling(50)).unwrap();
    let (mut wins, mut ties, mut sum1, mut sum4) = (0, 0, 0, 0);
    for &(s, t) in &sample {
        let x = search(&g, s, t, &SearchConfig::a1()).unwrap().visited_total();
        let y = search(&g, s, t, &SearchConfig::a4()).unwrap().visited_total();
        wins += usize::from(x < y);
        ties += usize::from(x == y);
        sum1 += x;
        sum4 += y;
    }
    let context = format!(
        "over {} sampled P4 pairs A1 < A4 on {wins}, ties {ties}, aggregate ratio {:.3}",
        sample.len(),
        sum1 as f64 / sum4 as f64
    );

    let (v1, v4) = (a1.visited_total(), a4.visited_total());
    ensure(v1 < v4, || format!("pair {s}->{t}: A1 visited {v1} not below A4 {v4}; {context}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "pair {s}->{t} (forward {} / backward {} reachable): A1 {v1} vs A4 {v4}, ratio {:.3}; {context}",
        profile.forward_count,
        profile.backward_count,
        v1 as f64 / v4 as f64
    ))
}

fn c6_p3_pathology() -> Outcome {
    let fx = pathology_fixture(20, 5, 3);
    let g = fx.raw.build();
    let (s, t) = (NodeId(fx.s as u32), NodeId(fx.t as u32));
    ensure(g.class_kind(NodeId(fx.i as u32)).unwrap() == ClassKind::Interface, || "hub kind".into())?;
    let a1 = search(&g, s, t, &SearchConfig::a1()).unwrap();
    let a4 = search(&g, s, t, &SearchConfig::a4()).unwrap();
    ensure(a4.meeting_point == Some(s) && a1.meeting_point == Some(s), || {
        format!("meeting points {:?} / {:?}", a1.meeting_point, a4.meeting_point)
    })?;
    ensure(a1.postponements >= 1, || "no postponement".into())?;
    ensure(a1.visited_backward > a4.visited_backward, || {
        format!("A1 backward {} not above A4 {}", a1.visited_backward, a4.visited_backward)
    })?;
    let extra = a1.visited_backward - a4.visited_backward;
    ensure(extra == PATHOLOGY_EXTRA_BACKWARD, || format!("extra {extra}, pinned {PATHOLOGY_EXTRA_BACKWARD}"))?;
    Ok(format!(
        "A1 backward {} vs A4 {} ({extra} extra), {} postponement(s), same length {}",
        a1.visited_backward, a4.visited_backward, a1.postponements, a1.length
    ))
}

fn c7_backend_invariance() -> Outcome {
    let g = hub_fixture();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hub.cgs");
    build_store(g, &path).unwrap();

    let mut pairs = sample_regime_pairs(g, &pinned_p4_sampling(10)).unwrap();
    pairs.extend(
        sample_regime_pairs(
            g,
            &PairSampling { regime: Regime::P1, budget: 5, seed: 1, require_path: false, max_attempts: None },
        )
        .unwrap(),
    );
    pairs.push((pairs[0].1, pairs[0].0));
    let configs = sweep_configs();
    let caches = [
        CacheConfig::default(),
        CacheConfig::default().with_capacity(8),
        CacheConfig { max_cached_nodes: 64, mode: CacheMode::WarmAcrossQueries, ..CacheConfig::default() },
    ];
    let mut cells = 0;
    for cache in &caches {
        let disk = open_store(&path, cache.clone()).unwrap();
        for &(s, t) in &pairs {
            for (label, c) in &configs {
                cells += 1;
                let mem = search(g, s, t, c).unwrap().without_timing();
                let before = disk.access_stats();
                let on_disk = search(&disk, s, t, c).unwrap().without_timing();
                ensure(mem == on_disk, || format!("{label} {s}->{t} cache {cache:?}: results differ"))?;
                let st = disk.access_stats();
                ensure(st.is_consistent(), || format!("{label} {s}->{t}: inconsistent stats {st:?}"))?;
                ensure(
                    st.meta_reads + st.adjacency_reads > before.meta_reads + before.adjacency_reads || s == t,
                    || format!("{label} {s}->{t}: no store reads recorded"),
                )?;
            }
        }
    }

    // Counter identity under random access sequences.
    let mut r = rng(77);
    let small = RawGraph::random(60, 0.06, 0.3, &mut r).build();
    let small_path = dir.path().join("small.cgs");
    build_store(&small, &small_path).unwrap();
    let mut ops = 0u64;
    for round in 0..200 {
        let cache = CacheConfig {
            max_cached_nodes: r.gen_range(1..80),
            mode: if r.gen_bool(0.5) { CacheMode::ColdPerQuery } else { CacheMode::WarmAcrossQueries },
            ..CacheConfig::default()
        };
        let disk = open_store(&small_path, cache).unwrap();
        let (mut meta, mut adj) = (0u64, 0u64);
        for _ in 0..300 {
            ops += 1;
            let u = NodeId(r.gen_range(0..60));
            match r.gen_range(0..7) {
                0 => {
                    disk.successors(u).unwrap();
                    adj += 1;
                }
                1 => {
                    disk.predecessors(u).unwrap();
                    adj += 1;
                }
                2 => {
                    disk.method_meta(u).unwrap();
                    meta += 1;
                }
                3 => {
                    disk.class_kind(u).unwrap();
                    meta += 1;
                }
                4 => disk.begin_query(),
                5 => disk.clear_cache(),
                _ => {
                    let before = disk.access_stats();
                    search(&disk, u, NodeId(r.gen_range(0..60)), &SearchConfig::a1()).unwrap();
                    let after = disk.access_stats();
                    meta += after.meta_reads - before.meta_reads;
                    adj += after.adjacency_reads - before.adjacency_reads;
                }
            }
            let st = disk.access_stats();
            ensure(st.is_consistent(), || format!("fuzz round {round}: {st:?}"))?;
            ensure(st.meta_reads == meta && st.adjacency_reads == adj, || {
                format!("fuzz round {round}: counted {meta}/{adj}, stats {st:?}")
            })?;
        }
    }
    Ok(format!("{cells} cells identical across 3 cache settings; {ops} fuzzed accesses kept hits + misses = reads"))
}

fn c8_probe_overhead() -> Outcome {
    let latency = Duration::from_millis(1);
    let mut scenario = Scenario::new(
        GraphSource::Synthetic(SyntheticSpec::hub_fixture()),
        vec![PairSpec::Sampled { label: Some("P4".into()), sample: pinned_p4_sampling(1) }],
        vec![AlgorithmSpec::new("A3", SearchConfig::a3()), AlgorithmSpec::new("A4", SearchConfig::a4())],
    );
    scenario.condition = Condition::OnDisk(CacheConfig::default().with_latency(latency));
    scenario.repetitions = 3;
    scenario.baseline = Some("A4".into());
    let report = run_scenario(&scenario).map_err(|e| e.to_string())?;
    let a3 = report.row("P4#1", "A3").ok_or("missing A3 row")?;
    let a4 = report.row("P4#1", "A4").ok_or("missing A4 row")?;
    let (m3, m4) = (a3.mean_elapsed_us.unwrap(), a4.mean_elapsed_us.unwrap());
    let diff = m3 - m4;
    let expected = a3.probe_count as f64 * latency.as_secs_f64() * 1e6;
    let detail = format!(
        "A3 {:.1} ms vs A4 {:.1} ms, difference {:.1} ms, probe_count {} x 1 ms = {:.1} ms (ratio {:.3})",
        m3 / 1e3,
        m4 / 1e3,
        diff / 1e3,
        a3.probe_count,
        expected / 1e3,
        diff / expected
    );
    ensure(m3 > m4, || format!("A3 not slower: {detail}"))?;
    ensure(diff >= expected / 2.0 && diff <= expected * 2.0, || format!("outside 2x: {detail}"))?;
    Ok(detail)
}

/// Backward sit-out of each postponed node that resumed before the search
/// ended, as (node, rounds, waiting events matched the countdown).
fn sit_outs(trace: &[TraceEvent]) -> Vec<(NodeId, usize, bool)> {
    let backward_steps: Vec<u32> = {
        let mut v: Vec<u32> = trace.iter().filter(|e| e.direction == Direction::Backward).map(|e| e.step).collect();
        v.dedup();
        v
    };
    let mut out = Vec::new();
    for held in trace.iter().filter(|e| e.action == TraceAction::Postponed) {
        let later: Vec<&TraceEvent> = trace
            .iter()
            .filter(|e| e.node == held.node && e.direction == Direction::Backward && e.step > held.step)
            .collect();
        let Some(resume) = later.iter().find(|e| e.action == TraceAction::Expanded) else { continue };
        let rounds = backward_steps.iter().filter(|&&s| s >= held.step && s < resume.step).count();
        let waits: Vec<u32> = later
            .iter()
            .take_while(|e| e.step < resume.step)
            .filter_map(|e| match e.action {
                TraceAction::Waiting { remaining } => Some(remaining),
                _ => None,
            })
            .collect();
        let countdown = waits.iter().rev().enumerate().all(|(i, &w)| w as usize == i) && waits.len() + 1 == rounds;
        out.push((held.node, rounds, countdown));
    }
    out
}

fn c9_delay_accounting() -> Outcome {
    let mut cases: Vec<(InMemoryGraph, Vec<(NodeId, NodeId)>)> = Vec::new();
    let mut r = rng(9);
    for _ in 0..2000 {
        let raw = random_instance(&mut r, 40);
        let pairs = query_pairs(&mut r, raw.n);
        cases.push((raw.build(), pairs));
    }
    let hub = hub_fixture().clone();
    let hub_pairs = sample_regime_pairs(&hub, &pinned_p4_sampling(20)).unwrap();
    cases.push((hub, hub_pairs));

    let mut complete = [0usize; 2];
    let mut postponed_runs = 0;
    for (ci, (g, pairs)) in cases.iter().enumerate() {
        for &(s, t) in pairs {
            for p in POLICIES {
                for (slot, delay) in [(0usize, 3u32), (1, 6)] {
                    let cfg = SearchConfig::a1().with_delay(delay).with_policy(p).with_trace();
                    let res = search(g, s, t, &cfg).unwrap();
                    if res.postponements == 0 {
                        continue;
                    }
                    postponed_runs += 1;
                    let held = res.trace.iter().filter(|e| e.action == TraceAction::Postponed).count();
                    ensure(held == res.postponements, || {
                        format!("case {ci}: {held} events, {} counted", res.postponements)
                    })?;
                    for (node, rounds, countdown) in sit_outs(&res.trace) {
                        ensure(rounds == delay as usize && countdown, || {
                            format!(
                                "case {ci} {s}->{t} delay {delay} ({}): node {node} sat out {rounds} rounds",
                                p.as_str()
                            )
                        })?;
                        complete[slot] += 1;
                    }
                }
            }
        }
    }
    ensure(complete[0] > 0 && complete[1] > 0, || format!("too few resumed nodes: {complete:?}"))?;
    Ok(format!(
        "{postponed_runs} runs with postponements; {} resumed nodes sat out exactly 3 rounds, {} exactly 6",
        complete[0], complete[1]
    ))
}

fn strip_timing(csv: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let keep: Vec<usize> = (0..header.len()).filter(|&i| !TIMING_COLUMNS.contains(&header[i])).collect();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(csv.as_bytes());
    let mut out = String::new();
    out.push_str(&keep.iter().map(|&i| header[i]).collect::<Vec<_>>().join(","));
    out.push('\n');
    for rec in reader.records() {
        let rec = rec.unwrap();
        out.push_str(&keep.iter().map(|&i| &rec[i]).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn c10_determinism() -> Outcome {
    let path = scenario_dir().join("p1_p4.json");
    let scenario = load_scenario(&path).map_err(|e| e.to_string())?;
    let a = emit_report(&run_scenario(&scenario).map_err(|e| e.to_string())?, ReportFormat::Csv);
    let b = emit_report(&run_scenario(&load_scenario(&path).unwrap()).unwrap(), ReportFormat::Csv);
    ensure(a != strip_timing(&a) || a.is_empty(), || "timing columns missing".into())?;
    let (sa, sb) = (strip_timing(&a), strip_timing(&b));
    ensure(sa == sb, || "CSV differs outside timing columns".into())?;
    let rows = sa.lines().count() - 1;
    let regimes: BTreeSet<Regime> = run_scenario(&scenario)
        .unwrap()
        .rows
        .iter()
        .filter(|r| r.expected_regime == Some(r.regime))
        .map(|r| r.regime)
        .collect();
    ensure(regimes.len() == 4, || format!("regimes covered: {regimes:?}"))?;
    Ok(format!(
        "{rows} rows byte-identical across runs outside {} timing columns; regimes {regimes:?}",
        TIMING_COLUMNS.len()
    ))
}
