use std::time::{Duration, Instant};

use crate::graph::{CallGraph, Edge, NodeId};

use super::path::UNREACHED;
use super::{SearchError, SearchResult, SearchStatus};

/// Unit-weight Dijkstra from `initial`, processed one distance layer per
/// step with ties broken by ascending NodeId. Returns once `target` is
/// settled; `visited_forward` counts the nodes expanded before that.
pub fn unidirectional_shortest_path<G: CallGraph + ?Sized>(
    graph: &G,
    initial: NodeId,
    target: NodeId,
) -> Result<SearchResult, SearchError> {
    graph.check_node(initial)?;
    graph.check_node(target)?;
    graph.begin_query();
    let started = Instant::now();
    if initial == target {
        let mut r = SearchResult::trivial(initial);
        r.elapsed = started.elapsed();
        return Ok(r);
    }

    let n = graph.node_count();
    let mut dist = vec![UNREACHED; n];
    let mut prev: Vec<Option<NodeId>> = vec![None; n];
    dist[initial.index()] = 0;
    let mut layer = vec![initial];
    let mut visited = 0usize;
    let mut steps = 0usize;
    let mut found = false;

    'layers: while !layer.is_empty() {
        steps += 1;
        let mut next = Vec::new();
        for &u in &layer {
            if u == target {
                found = true;
                break 'layers;
            }
            visited += 1;
            let alt = dist[u.index()] + 1;
            for &v in graph.successors(u)?.iter() {
                if dist[v.index()] == UNREACHED {
                    dist[v.index()] = alt;
                    prev[v.index()] = Some(u);
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        layer = next;
    }

    let mut result = SearchResult {
        status: SearchStatus::NoPath,
        path: Vec::new(),
        length: 0,
        meeting_point: None,
        meeting_distances: None,
        visited_forward: visited,
        visited_backward: 0,
        postponements: 0,
        probe_count: 0,
        steps,
        elapsed: Duration::ZERO,
        trace: Vec::new(),
    };
    if found {
        let mut path = Vec::new();
        let mut v = target;
        while let Some(u) = prev[v.index()] {
            path.push(Edge::new(u, v));
            v = u;
        }
        path.reverse();
        result.status = SearchStatus::Found;
        result.length = path.len();
        result.meeting_distances = Some((dist[target.index()], 0));
        result.meeting_point = Some(target);
        result.path = path;
    }
    result.elapsed = started.elapsed();
    Ok(result)
}
