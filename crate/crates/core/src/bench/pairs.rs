use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{CallGraph, Direction, GraphError, NodeId};
use crate::ingest::{classify_counts, reachable_count, Regime};

use super::PairSampling;

/// Up to `budget` distinct pairs of the requested regime, drawn
/// deterministically from `seed`. May return fewer, or none.
pub fn find_regime_pairs<G: CallGraph + ?Sized>(
    graph: &G,
    regime: Regime,
    budget: usize,
    seed: u64,
) -> Result<Vec<(NodeId, NodeId)>, GraphError> {
    sample_regime_pairs(graph, &PairSampling { regime, budget, seed, require_path: false, max_attempts: None })
}

/// Endpoints on a side that must be "many" are drawn uniformly from nodes
/// with a nonzero degree in that direction; other endpoints from all nodes.
/// Initial and final are always distinct.
pub fn sample_regime_pairs<G: CallGraph + ?Sized>(
    graph: &G,
    sampling: &PairSampling,
) -> Result<Vec<(NodeId, NodeId)>, GraphError> {
    let n = graph.node_count();
    if sampling.budget == 0 || n < 2 {
        return Ok(Vec::new());
    }
    let all: Vec<NodeId> = (0..n as u32).map(NodeId).collect();
    let with_degree = |dir: Direction| -> Result<Vec<NodeId>, GraphError> {
        let mut v = Vec::new();
        for &u in &all {
            if !graph.neighbors(u, dir)?.is_empty() {
                v.push(u);
            }
        }
        Ok(v)
    };
    let (forward_many, backward_many) = match sampling.regime {
        Regime::P1 => (true, false),
        Regime::P3 => (false, true),
        Regime::P4 => (true, true),
        Regime::P2 | Regime::Unclassified => (false, false),
    };
    let sources = if forward_many { with_degree(Direction::Forward)? } else { all.clone() };
    let targets = if backward_many { with_degree(Direction::Backward)? } else { all.clone() };
    if sources.is_empty() || targets.is_empty() {
        return Ok(Vec::new());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let attempts = sampling.max_attempts.unwrap_or_else(|| (64 * sampling.budget).max(1024));
    let mut forward_counts: HashMap<NodeId, usize> = HashMap::new();
    let mut backward_counts: HashMap<NodeId, usize> = HashMap::new();
    let mut closures: HashMap<NodeId, Vec<bool>> = HashMap::new();
    let mut seen = HashSet::new();
    let mut out = Vec::new();

    for _ in 0..attempts {
        if out.len() == sampling.budget {
            break;
        }
        let s = sources[rng.gen_range(0..sources.len())];
        let t = targets[rng.gen_range(0..targets.len())];
        if s == t || !seen.insert((s, t)) {
            continue;
        }
        let f = match forward_counts.get(&s) {
            Some(&c) => c,
            None => *forward_counts.entry(s).or_insert(reachable_count(graph, s, Direction::Forward)?),
        };
        let b = match backward_counts.get(&t) {
            Some(&c) => c,
            None => *backward_counts.entry(t).or_insert(reachable_count(graph, t, Direction::Backward)?),
        };
        if classify_counts(f, b, n) != sampling.regime {
            continue;
        }
        if sampling.require_path {
            let reach = match closures.entry(s) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(e) => e.insert(forward_closure(graph, s)?),
            };
            if !reach[t.index()] {
                continue;
            }
        }
        out.push((s, t));
    }
    Ok(out)
}

fn forward_closure<G: CallGraph + ?Sized>(graph: &G, s: NodeId) -> Result<Vec<bool>, GraphError> {
    let mut seen = vec![false; graph.node_count()];
    seen[s.index()] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in graph.successors(u)?.iter() {
            if !seen[v.index()] {
                seen[v.index()] = true;
                queue.push_back(v);
            }
        }
    }
    Ok(seen)
}
