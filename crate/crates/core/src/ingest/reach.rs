//! Reachability closures and endpoint-pair regime classification.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{CallGraph, Direction, GraphError, NodeId};

/// A closure is "many" once it reaches this fraction of the graph.
pub const MANY_FRACTION: f64 = 0.05;
/// One closure "much" exceeds the other at this ratio.
pub const DOMINANCE_RATIO: u64 = 5;

/// Nodes reachable from `start` in `direction`, excluding `start` itself.
pub fn reachable_count<G: CallGraph + ?Sized>(
    graph: &G,
    start: NodeId,
    direction: Direction,
) -> Result<usize, GraphError> {
    graph.check_node(start)?;
    let mut seen = vec![false; graph.node_count()];
    let mut queue = VecDeque::from([start]);
    seen[start.index()] = true;
    let mut count = 0;
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u, direction)?.iter() {
            if !seen[v.index()] {
                seen[v.index()] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    Ok(count)
}

/// Shape of an (initial, final) pair by closure sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// Forward closure much larger than backward.
    P1,
    /// Both closures small.
    P2,
    /// Backward closure much larger than forward.
    P3,
    /// Both closures large and comparable.
    P4,
    #[serde(rename = "unclassified")]
    Unclassified,
}

impl Regime {
    pub const LABELED: [Regime; 4] = [Regime::P1, Regime::P2, Regime::P3, Regime::P4];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::P1 => "P1",
            Regime::P2 => "P2",
            Regime::P3 => "P3",
            Regime::P4 => "P4",
            Regime::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "P1" => Ok(Regime::P1),
            "P2" => Ok(Regime::P2),
            "P3" => Ok(Regime::P3),
            "P4" => Ok(Regime::P4),
            "UNCLASSIFIED" => Ok(Regime::Unclassified),
            other => Err(format!("unknown regime `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairProfile {
    pub forward_count: usize,
    pub backward_count: usize,
    pub regime: Regime,
}

/// Classifies closure sizes against a graph of `node_count` nodes.
///
/// Rules are checked in order: P1 (forward many and ≥5× backward), P3 (the
/// mirror), P4 (both many), P2 (both few). Anything else, one many and one
/// few without 5× dominance, is `Unclassified`.
pub fn classify_counts(forward: usize, backward: usize, node_count: usize) -> Regime {
    let threshold = MANY_FRACTION * node_count as f64;
    let many = |c: usize| c > 0 && c as f64 >= threshold;
    let dominates = |a: usize, b: usize| (a as u64) >= DOMINANCE_RATIO.saturating_mul(b as u64);
    match (many(forward), many(backward)) {
        (true, _) if dominates(forward, backward) => Regime::P1,
        (_, true) if dominates(backward, forward) => Regime::P3,
        (true, true) => Regime::P4,
        (false, false) => Regime::P2,
        _ => Regime::Unclassified,
    }
}

pub fn classify_pair<G: CallGraph + ?Sized>(
    graph: &G,
    initial: NodeId,
    target: NodeId,
) -> Result<PairProfile, GraphError> {
    let forward_count = reachable_count(graph, initial, Direction::Forward)?;
    let backward_count = reachable_count(graph, target, Direction::Backward)?;
    Ok(PairProfile {
        forward_count,
        backward_count,
        regime: classify_counts(forward_count, backward_count, graph.node_count()),
    })
}
