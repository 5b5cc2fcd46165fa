use std::time::Instant;

use crate::graph::{CallGraph, Direction, NodeId};

use super::path::{reconstruct_path, SearchState, UNREACHED};
use super::{
    Algorithm, FrontierPolicy, KindSet, SearchConfig, SearchError, SearchResult, SearchStatus, TraceAction, TraceEvent,
};

#[derive(Clone, Copy, Debug)]
enum Postpone {
    /// Balanced search: no predicate, no probes.
    Off,
    /// Probe the class kind of every backward node, never hold it.
    ProbeOnly,
    Hold {
        delay_steps: u32,
        kinds: KindSet,
    },
}

/// One bidirectional query. Runs the balanced search or its postponing
/// variant depending on the configuration.
pub struct BidirSearch<'g, G: CallGraph + ?Sized> {
    graph: &'g G,
    initial: NodeId,
    target: NodeId,
    policy: FrontierPolicy,
    postpone: Postpone,
    trace: bool,
    state: SearchState,
}

/// Which frontier each node currently sits in, plus dedup for the frontier
/// being rebuilt.
struct Marks {
    forward: Vec<bool>,
    backward: Vec<bool>,
    next: Vec<bool>,
}

impl<'g, G: CallGraph + ?Sized> BidirSearch<'g, G> {
    pub fn new(graph: &'g G, initial: NodeId, target: NodeId, config: &SearchConfig) -> Result<Self, SearchError> {
        config.validate()?;
        graph.check_node(initial)?;
        graph.check_node(target)?;
        let postpone = match config.algorithm {
            Algorithm::BidirBalanced => Postpone::Off,
            Algorithm::BidirPostpone if config.probe_only => Postpone::ProbeOnly,
            Algorithm::BidirPostpone if !config.postpones() => Postpone::Off,
            Algorithm::BidirPostpone => {
                Postpone::Hold { delay_steps: config.delay_steps, kinds: config.postpone_kinds }
            }
            Algorithm::Unidirectional => {
                return Err(SearchError::InvalidConfig("unidirectional is not a bidirectional search".into()))
            }
        };
        Ok(BidirSearch {
            graph,
            initial,
            target,
            policy: config.frontier_policy,
            postpone,
            trace: config.trace,
            state: SearchState::new(graph.node_count(), initial, target),
        })
    }

    pub fn state(&self) -> &SearchState {
        &self.state
    }

    pub fn run(&mut self) -> Result<SearchResult, SearchError> {
        self.graph.begin_query();
        let started = Instant::now();
        if self.initial == self.target {
            self.state.intermed = Some(self.initial);
            let mut result = SearchResult::trivial(self.initial);
            result.elapsed = started.elapsed();
            return Ok(result);
        }

        let n = self.graph.node_count();
        let mut marks = Marks { forward: vec![false; n], backward: vec![false; n], next: vec![false; n] };
        marks.forward[self.initial.index()] = true;
        marks.backward[self.target.index()] = true;
        let mut expanded_forward = vec![false; n];
        let mut expanded_backward = vec![false; n];
        let (mut visited_forward, mut visited_backward) = (0usize, 0usize);
        let mut postponements = 0usize;
        let mut probes = 0usize;
        let mut steps = 0usize;
        let mut events = Vec::new();

        let st = &mut self.state;
        'rounds: while !st.todo_forward.is_empty() || !st.todo_backward.is_empty() {
            let forward = self.policy.expand_forward(st.todo_forward.len(), st.todo_backward.len());
            let direction = if forward { Direction::Forward } else { Direction::Backward };
            steps += 1;

            let todo = std::mem::take(if forward { &mut st.todo_forward } else { &mut st.todo_backward });
            let mut next: Vec<NodeId> = Vec::with_capacity(todo.len());

            for &u in &todo {
                let ui = u.index();
                if st.delay[ui] > 0 {
                    st.delay[ui] -= 1;
                    push_next(&mut next, &mut marks.next, u);
                    if self.trace {
                        events.push(event(steps, direction, u, TraceAction::Waiting { remaining: st.delay[ui] }));
                    }
                    continue;
                }
                if !forward {
                    match self.postpone {
                        Postpone::Off => {}
                        Postpone::ProbeOnly => {
                            self.graph.class_kind(u)?;
                            probes += 1;
                        }
                        Postpone::Hold { delay_steps, kinds } => {
                            if !st.postponed[ui] {
                                let kind = self.graph.class_kind(u)?;
                                probes += 1;
                                if kinds.contains(kind) {
                                    st.postponed[ui] = true;
                                    st.delay[ui] = delay_steps - 1;
                                    postponements += 1;
                                    push_next(&mut next, &mut marks.next, u);
                                    if self.trace {
                                        events.push(event(steps, direction, u, TraceAction::Postponed));
                                    }
                                    continue;
                                }
                            }
                        }
                    }
                }

                let (expanded, visited) = if forward {
                    (&mut expanded_forward, &mut visited_forward)
                } else {
                    (&mut expanded_backward, &mut visited_backward)
                };
                if !expanded[ui] {
                    expanded[ui] = true;
                    *visited += 1;
                }
                if self.trace {
                    events.push(event(steps, direction, u, TraceAction::Expanded));
                }

                let (dist, prev, opposite) = if forward {
                    (&mut st.dist_forward, &mut st.prev_forward, &marks.backward)
                } else {
                    (&mut st.dist_backward, &mut st.prev_backward, &marks.forward)
                };
                let alt = dist[ui] + 1;
                for &v in self.graph.neighbors(u, direction)?.iter() {
                    let vi = v.index();
                    if dist[vi] > alt {
                        prev[vi] = Some(u);
                        dist[vi] = alt;
                        if opposite[vi] {
                            st.intermed = Some(v);
                            break 'rounds;
                        }
                        push_next(&mut next, &mut marks.next, v);
                    }
                }
            }

            next.sort_unstable();
            let own = if forward { &mut marks.forward } else { &mut marks.backward };
            for &u in &todo {
                own[u.index()] = false;
            }
            for &u in &next {
                own[u.index()] = true;
                marks.next[u.index()] = false;
            }
            if forward {
                st.todo_forward = next;
            } else {
                st.todo_backward = next;
            }
        }

        let mut result = SearchResult {
            status: SearchStatus::NoPath,
            path: Vec::new(),
            length: 0,
            meeting_point: None,
            meeting_distances: None,
            visited_forward,
            visited_backward,
            postponements,
            probe_count: probes,
            steps,
            elapsed: std::time::Duration::ZERO,
            trace: events,
        };
        if let Some(meet) = st.intermed {
            let path = reconstruct_path(st, self.initial, self.target);
            let (df, db) = (st.dist_forward[meet.index()], st.dist_backward[meet.index()]);
            debug_assert!(df != UNREACHED && db != UNREACHED);
            result.status = SearchStatus::Found;
            result.length = path.len();
            result.path = path;
            result.meeting_point = Some(meet);
            result.meeting_distances = Some((df, db));
        }
        result.elapsed = started.elapsed();
        Ok(result)
    }
}

fn push_next(next: &mut Vec<NodeId>, in_next: &mut [bool], v: NodeId) {
    if !in_next[v.index()] {
        in_next[v.index()] = true;
        next.push(v);
    }
}

fn event(step: usize, direction: Direction, node: NodeId, action: TraceAction) -> TraceEvent {
    TraceEvent { step: step as u32, direction, node, action }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{transceiver_example, ClassKind, Edge, GraphBuilder, InMemoryGraph, NodeSpec};
    use crate::search::{bidir_balanced, bidir_postpone};

    fn chain(kinds: &[ClassKind]) -> InMemoryGraph {
        let mut b = GraphBuilder::new();
        for (i, &k) in kinds.iter().enumerate() {
            b.add_node(NodeSpec::new(format!("n{i}"), format!("C{i}"), "m", k)).unwrap();
        }
        for i in 1..kinds.len() {
            b.add_edge(NodeId(i as u32 - 1), NodeId(i as u32)).unwrap();
        }
        b.build()
    }

    #[test]
    fn transceiver_paths() {
        let g = transceiver_example();
        let (transmit, send) = (NodeId(0), NodeId(3));
        for policy in [FrontierPolicy::LargerFirst, FrontierPolicy::SmallerFirst] {
            let r = bidir_balanced(&g, transmit, send, policy).unwrap();
            assert_eq!(r.status, SearchStatus::Found);
            assert_eq!(r.path, vec![Edge::new(transmit, send)]);
            assert!(matches!(r.meeting_point, Some(m) if m == transmit || m == send));
            assert_eq!((r.postponements, r.probe_count), (0, 0));

            let r = bidir_postpone(&g, transmit, send, &SearchConfig::a1().with_policy(policy)).unwrap();
            assert_eq!(r.length, 1);
            assert_eq!(r.postponements, 0);

            let r = bidir_balanced(&g, send, transmit, policy).unwrap();
            assert_eq!(r.status, SearchStatus::NoPath);
            assert!(r.path.is_empty() && r.meeting_point.is_none());
        }
    }

    #[test]
    fn same_endpoint_is_empty_path() {
        let g = transceiver_example();
        let r = bidir_postpone(&g, NodeId(2), NodeId(2), &SearchConfig::a1()).unwrap();
        assert_eq!(r.status, SearchStatus::Found);
        assert!(r.path.is_empty());
        assert_eq!(r.length, 0);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn invalid_nodes_rejected() {
        let g = transceiver_example();
        assert!(matches!(
            bidir_balanced(&g, NodeId(0), NodeId(7), FrontierPolicy::LargerFirst),
            Err(SearchError::Graph(_))
        ));
    }

    #[test]
    fn postponed_node_is_held_delay_rounds() {
        use ClassKind::*;
        // 0 -> 1 -> 2 -> 3 with node 2 an interface method; backward search
        // reaches it in round 2 and holds it through round 4.
        let g = chain(&[Concrete, Concrete, Interface, Concrete]);
        let r = bidir_postpone(&g, NodeId(0), NodeId(3), &SearchConfig::a1().with_trace()).unwrap();
        assert_eq!(r.status, SearchStatus::Found);
        assert_eq!(r.postponements, 1);
        let held: Vec<(u32, TraceAction)> =
            r.trace.iter().filter(|e| e.node == NodeId(2)).map(|e| (e.step, e.action)).collect();
        assert_eq!(
            held,
            vec![
                (2, TraceAction::Postponed),
                (3, TraceAction::Waiting { remaining: 1 }),
                (4, TraceAction::Waiting { remaining: 0 }),
                (5, TraceAction::Expanded),
            ]
        );
        assert_eq!(r.length, 3);
        let balanced = bidir_balanced(&g, NodeId(0), NodeId(3), FrontierPolicy::LargerFirst).unwrap();
        assert_eq!(r.steps, balanced.steps + 3);
    }

    #[test]
    fn probe_only_probes_backward_nodes() {
        let g = chain(&[ClassKind::Concrete; 5]);
        let r = bidir_postpone(&g, NodeId(0), NodeId(4), &SearchConfig::a3()).unwrap();
        let b = bidir_balanced(&g, NodeId(0), NodeId(4), FrontierPolicy::LargerFirst).unwrap();
        assert_eq!(r.probe_count, r.visited_backward);
        assert!(r.probe_count > 0);
        assert_eq!(r.without_timing().path, b.path);
        assert_eq!((r.visited_forward, r.visited_backward, r.steps), (b.visited_forward, b.visited_backward, b.steps));
    }

    #[test]
    fn state_distances_match_meeting() {
        use ClassKind::*;
        let g = chain(&[Concrete, Abstract, Concrete, Interface, Concrete, Concrete]);
        let config = SearchConfig::a1().with_policy(FrontierPolicy::SmallerFirst);
        let mut s = BidirSearch::new(&g, NodeId(0), NodeId(5), &config).unwrap();
        let r = s.run().unwrap();
        let m = r.meeting_point.unwrap();
        let st = s.state();
        assert_eq!(r.length as u32, st.dist_forward[m.index()] + st.dist_backward[m.index()]);
        assert_eq!(r.meeting_distances, Some((st.dist_forward[m.index()], st.dist_backward[m.index()])));
    }
}
