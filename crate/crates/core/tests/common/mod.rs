//! Test oracles. These work on raw edge lists and adjacency matrices and
//! share no code with the search implementations they check.

#![allow(dead_code)]

use std::collections::VecDeque;

use callpath::graph::{GraphBuilder, InMemoryGraph, NodeSpec};
use callpath::{ClassKind, Edge, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A graph instance as the oracles see it.
#[derive(Clone, Debug)]
pub struct RawGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub kinds: Vec<ClassKind>,
}

impl RawGraph {
    pub fn build(&self) -> InMemoryGraph {
        let mut b = GraphBuilder::new();
        for i in 0..self.n {
            b.add_node(NodeSpec::new(format!("n{i}"), format!("C{i}"), format!("m{i}"), self.kinds[i])).unwrap();
        }
        for &(u, v) in &self.edges {
            b.add_edge(NodeId(u as u32), NodeId(v as u32)).unwrap();
        }
        b.build()
    }

    pub fn matrix(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.n]; self.n];
        for &(u, v) in &self.edges {
            m[u][v] = true;
        }
        m
    }

    /// Graph over `n` nodes whose edges are the set bits of `mask`, enumerating
    /// ordered pairs (u, v) in row-major order, self-loops included.
    pub fn from_mask(n: usize, mask: u64, kinds: Vec<ClassKind>) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if mask >> (u * n + v) & 1 == 1 {
                    edges.push((u, v));
                }
            }
        }
        RawGraph { n, edges, kinds }
    }

    pub fn random(n: usize, p: f64, kind_p: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let kinds = (0..n).map(|_| random_kind(rng, kind_p)).collect();
        RawGraph { n, edges, kinds }
    }
}

pub fn random_kind(rng: &mut ChaCha8Rng, p: f64) -> ClassKind {
    if rng.gen_bool(p) {
        if rng.gen_bool(0.5) {
            ClassKind::Interface
        } else {
            ClassKind::Abstract
        }
    } else {
        ClassKind::Concrete
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distances from `s` over the adjacency matrix; `None` = unreachable.
pub fn bfs_distances(matrix: &[Vec<bool>], s: usize) -> Vec<Option<usize>> {
    let n = matrix.len();
    let mut dist = vec![None; n];
    dist[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for v in 0..n {
            if matrix[u][v] && dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

/// Reflexive-transitive closure by Warshall's algorithm.
pub fn closure(matrix: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = matrix.len();
    let mut r = matrix.to_vec();
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Forward and backward closure sizes (excluding the node itself).
pub fn closure_counts(closure: &[Vec<bool>], node: usize) -> (usize, usize) {
    let n = closure.len();
    let fwd = (0..n).filter(|&j| j != node && closure[node][j]).count();
    let bwd = (0..n).filter(|&i| i != node && closure[i][node]).count();
    (fwd, bwd)
}

/// Checks that `path` is a contiguous directed walk from `s` to `t` along
/// edges of `matrix`. An empty path is valid only when `s == t`.
pub fn validate_path(matrix: &[Vec<bool>], s: usize, t: usize, path: &[Edge]) -> Result<(), String> {
    if path.is_empty() {
        return if s == t { Ok(()) } else { Err(format!("empty path for {s} != {t}")) };
    }
    if path[0].caller.index() != s {
        return Err(format!("path starts at {} not {s}", path[0].caller));
    }
    if path.last().unwrap().callee.index() != t {
        return Err(format!("path ends at {} not {t}", path.last().unwrap().callee));
    }
    for w in path.windows(2) {
        if w[0].callee != w[1].caller {
            return Err(format!("gap between {} and {}", w[0], w[1]));
        }
    }
    for e in path {
        if !matrix[e.caller.index()][e.callee.index()] {
            return Err(format!("edge {e} not in graph"));
        }
    }
    Ok(())
}

/// Chain-plus-hub instance for the postponement pathology.
///
/// `s -> i -> t` with `i` an Interface hub that has `hub_callers` further
/// callers, and `t` has `branches` other callers, each the end of a caller
/// chain of length `depth`. All ids of `s`, `i`, `t` are lowest so the
/// balanced search meets at `s` right after expanding `i`.
pub struct Pathology {
    pub raw: RawGraph,
    pub s: usize,
    pub i: usize,
    pub t: usize,
}

pub fn pathology_fixture(hub_callers: usize, branches: usize, depth: usize) -> Pathology {
    let (s, i, t) = (0, 1, 2);
    let mut edges = vec![(s, i), (i, t)];
    let mut next = 3;
    for _ in 0..hub_callers {
        edges.push((next, i));
        next += 1;
    }
    for _ in 0..branches {
        let mut callee = t;
        for _ in 0..depth {
            edges.push((next, callee));
            callee = next;
            next += 1;
        }
    }
    let mut kinds = vec![ClassKind::Concrete; next];
    kinds[i] = ClassKind::Interface;
    Pathology { raw: RawGraph { n: next, edges, kinds }, s, i, t }
}
