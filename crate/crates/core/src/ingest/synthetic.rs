//! Seeded synthetic call graphs.
//!
//! The random source is ChaCha8 (`rand_chacha`) seeded from a `u64`, which
//! gives identical streams on every platform. Background edges are drawn
//! first; hub callers are wired afterwards and only ever add edges.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ClassKind, GraphBuilder, InMemoryGraph, NodeId, NodeSpec};

/// How background edges are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeModel {
    /// Each ordered pair of distinct nodes is an edge with this probability.
    EdgeProbability(f64),
    /// Each node calls this many distinct random callees (fewer if the
    /// acyclic constraint leaves too few candidates).
    OutDegree(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub node_count: u32,
    pub edges: EdgeModel,
    #[serde(default)]
    pub hub_count: u32,
    #[serde(default = "default_hub_indegree")]
    pub hub_indegree: u32,
    #[serde(default = "default_hub_kind")]
    pub hub_kind: ClassKind,
    pub seed: u64,
    #[serde(default)]
    pub acyclic: bool,
}

fn default_hub_indegree() -> u32 {
    1
}

fn default_hub_kind() -> ClassKind {
    ClassKind::Interface
}

impl SyntheticSpec {
    pub fn new(node_count: u32, edges: EdgeModel, seed: u64) -> Self {
        SyntheticSpec {
            node_count,
            edges,
            hub_count: 0,
            hub_indegree: 1,
            hub_kind: ClassKind::Interface,
            seed,
            acyclic: false,
        }
    }

    pub fn with_hubs(mut self, hub_count: u32, hub_indegree: u32) -> Self {
        self.hub_count = hub_count;
        self.hub_indegree = hub_indegree;
        self
    }

    /// 1000 nodes, out-degree 3, 10 interface hubs with 50 extra callers each,
    /// seed 7.
    pub fn hub_fixture() -> Self {
        SyntheticSpec::new(1000, EdgeModel::OutDegree(3), 7).with_hubs(10, 50)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("node_count must be positive")]
    NoNodes,
    #[error("edge probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("hub_count {hub_count} exceeds node_count {node_count}")]
    TooManyHubs { hub_count: u32, node_count: u32 },
    #[error("hub_indegree must be positive")]
    ZeroHubIndegree,
    #[error("hub_indegree {hub_indegree} is infeasible: at most {max} distinct callers available")]
    InfeasibleIndegree { hub_indegree: u32, max: u32 },
}

/// A generated graph together with the hub nodes the generator placed.
#[derive(Clone, Debug)]
pub struct SyntheticGraph {
    pub graph: InMemoryGraph,
    pub hubs: Vec<NodeId>,
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticGraph, SpecError> {
    let n = spec.node_count;
    if n == 0 {
        return Err(SpecError::NoNodes);
    }
    if let EdgeModel::EdgeProbability(p) = spec.edges {
        if !(0.0..=1.0).contains(&p) {
            return Err(SpecError::BadProbability(p));
        }
    }
    if spec.hub_count > n {
        return Err(SpecError::TooManyHubs { hub_count: spec.hub_count, node_count: n });
    }
    if spec.hub_count > 0 {
        if spec.hub_indegree == 0 {
            return Err(SpecError::ZeroHubIndegree);
        }
        if spec.hub_indegree > n - 1 {
            return Err(SpecError::InfeasibleIndegree { hub_indegree: spec.hub_indegree, max: n - 1 });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // In acyclic mode rank == NodeId, so a hub needs at least hub_indegree
    // lower-ranked nodes to draw callers from.
    let hubs: Vec<u32> = if spec.hub_count == 0 {
        Vec::new()
    } else {
        let first = if spec.acyclic { spec.hub_indegree } else { 0 };
        let candidates = n - first;
        if candidates < spec.hub_count {
            return Err(SpecError::InfeasibleIndegree {
                hub_indegree: spec.hub_indegree,
                max: n.saturating_sub(spec.hub_count),
            });
        }
        let mut picked: Vec<u32> = index::sample(&mut rng, candidates as usize, spec.hub_count as usize)
            .into_iter()
            .map(|i| first + i as u32)
            .collect();
        picked.sort_unstable();
        picked
    };

    let mut is_hub = vec![false; n as usize];
    for &h in &hubs {
        is_hub[h as usize] = true;
    }

    let mut builder = GraphBuilder::new();
    for i in 0..n {
        let (class, kind) =
            if is_hub[i as usize] { (format!("I{i}"), spec.hub_kind) } else { (format!("C{i}"), ClassKind::Concrete) };
        builder
            .add_node(NodeSpec::new(format!("n{i}"), class, format!("m{i}"), kind))
            .expect("generated keys are unique");
    }

    let add = |b: &mut GraphBuilder, u: u32, v: u32| {
        b.add_edge(NodeId(u), NodeId(v)).expect("generated endpoints exist");
    };

    match spec.edges {
        EdgeModel::EdgeProbability(p) if p > 0.0 => {
            for u in 0..n {
                let lo = if spec.acyclic { u + 1 } else { 0 };
                for v in lo..n {
                    if v != u && rng.gen_bool(p) {
                        add(&mut builder, u, v);
                    }
                }
            }
        }
        EdgeModel::EdgeProbability(_) => {}
        EdgeModel::OutDegree(k) => {
            for u in 0..n {
                let pool = if spec.acyclic { n - 1 - u } else { n - 1 };
                let take = k.min(pool) as usize;
                if take == 0 {
                    continue;
                }
                let mut targets: Vec<u32> = index::sample(&mut rng, pool as usize, take)
                    .into_iter()
                    .map(|i| {
                        let i = i as u32;
                        if spec.acyclic {
                            u + 1 + i
                        } else if i >= u {
                            i + 1
                        } else {
                            i
                        }
                    })
                    .collect();
                targets.sort_unstable();
                for v in targets {
                    add(&mut builder, u, v);
                }
            }
        }
    }

    for &h in &hubs {
        let pool = if spec.acyclic { h } else { n - 1 };
        let mut callers: Vec<u32> = index::sample(&mut rng, pool as usize, spec.hub_indegree as usize)
            .into_iter()
            .map(|i| {
                let i = i as u32;
                if !spec.acyclic && i >= h {
                    i + 1
                } else {
                    i
                }
            })
            .collect();
        callers.sort_unstable();
        for c in callers {
            add(&mut builder, c, h);
        }
    }

    Ok(SyntheticGraph { graph: builder.build(), hubs: hubs.into_iter().map(NodeId).collect() })
}
