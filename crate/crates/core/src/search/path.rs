use crate::graph::{Edge, NodeId};

/// Distance value of a node not yet reached.
pub const UNREACHED: u32 = u32::MAX;

/// Per-query bookkeeping of the bidirectional search.
///
/// Indexed by `NodeId`. Distances are edge counts from the initial node
/// (`dist_forward`) and to the final node (`dist_backward`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchState {
    pub todo_forward: Vec<NodeId>,
    pub todo_backward: Vec<NodeId>,
    pub prev_forward: Vec<Option<NodeId>>,
    pub prev_backward: Vec<Option<NodeId>>,
    pub dist_forward: Vec<u32>,
    pub dist_backward: Vec<u32>,
    pub delay: Vec<u32>,
    pub postponed: Vec<bool>,
    pub intermed: Option<NodeId>,
}

impl SearchState {
    pub fn new(node_count: usize, initial: NodeId, target: NodeId) -> Self {
        let mut s = SearchState {
            todo_forward: vec![initial],
            todo_backward: vec![target],
            prev_forward: vec![None; node_count],
            prev_backward: vec![None; node_count],
            dist_forward: vec![UNREACHED; node_count],
            dist_backward: vec![UNREACHED; node_count],
            delay: vec![0; node_count],
            postponed: vec![false; node_count],
            intermed: None,
        };
        s.dist_forward[initial.index()] = 0;
        s.dist_backward[target.index()] = 0;
        s
    }
}

/// Edges from `initial` to `target` through `state.intermed`: the forward
/// predecessor chain walked back to `initial` and reversed, then the backward
/// chain walked on to `target`.
///
/// # Panics
///
/// If `intermed` is unset or a chain does not end at its endpoint. Both are
/// internal invariant violations of the search, never user errors.
pub fn reconstruct_path(state: &SearchState, initial: NodeId, target: NodeId) -> Vec<Edge> {
    let meet = state.intermed.expect("reconstruct_path requires a meeting point");
    let limit = state.prev_forward.len();
    let mut path = Vec::new();

    let mut v = meet;
    while let Some(u) = state.prev_forward[v.index()] {
        path.push(Edge::new(u, v));
        v = u;
        assert!(path.len() <= limit, "forward predecessor chain from {meet} cycles");
    }
    assert_eq!(v, initial, "forward predecessor chain from {meet} ends at {v}, not {initial}");
    path.reverse();

    let forward_len = path.len();
    let mut v = meet;
    while let Some(w) = state.prev_backward[v.index()] {
        path.push(Edge::new(v, w));
        v = w;
        assert!(path.len() - forward_len <= limit, "backward predecessor chain from {meet} cycles");
    }
    assert_eq!(v, target, "backward predecessor chain from {meet} ends at {v}, not {target}");
    path
}
