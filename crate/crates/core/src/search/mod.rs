//! Path searches over a [`CallGraph`].
//!
//! Three algorithm families share one result type:
//!
//! * [`unidirectional_shortest_path`]: unit-weight Dijkstra from the initial
//!   node (a layered BFS that stops when the final node is settled).
//! * [`bidir_balanced`]: layered bidirectional search that terminates when a
//!   node relaxed by one side is found in the other side's frontier.
//! * [`bidir_postpone`]: the balanced search, except that a backward-frontier
//!   node whose class kind is in [`SearchConfig::postpone_kinds`] is held in
//!   its frontier for [`SearchConfig::delay_steps`] backward rounds before it
//!   is expanded. Each node is held at most once per query.
//!
//! The presets [`SearchConfig::a1`] to [`SearchConfig::a4`] name the four
//! bidirectional variants compared by the bench harness.

mod bidir;
mod path;
mod unidirectional;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{CallGraph, ClassKind, Direction, Edge, GraphError, NodeId};

pub use bidir::BidirSearch;
pub use path::{reconstruct_path, SearchState, UNREACHED};
pub use unidirectional::unidirectional_shortest_path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Unidirectional,
    BidirBalanced,
    BidirPostpone,
}

/// How the search picks which frontier to expand next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FrontierPolicy {
    /// Expand forward only when the backward frontier is strictly smaller
    /// than the forward one; ties go backward.
    #[default]
    LargerFirst,
    /// Expand the smaller frontier; ties go forward. An empty frontier is
    /// never chosen while the other is non-empty.
    SmallerFirst,
}

impl FrontierPolicy {
    pub(crate) fn expand_forward(self, forward_len: usize, backward_len: usize) -> bool {
        match self {
            FrontierPolicy::LargerFirst => backward_len < forward_len,
            FrontierPolicy::SmallerFirst => {
                if forward_len == 0 {
                    false
                } else if backward_len == 0 {
                    true
                } else {
                    forward_len <= backward_len
                }
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FrontierPolicy::LargerFirst => "larger",
            FrontierPolicy::SmallerFirst => "smaller",
        }
    }
}

impl std::str::FromStr for FrontierPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "larger" | "larger_first" => Ok(FrontierPolicy::LargerFirst),
            "smaller" | "smaller_first" => Ok(FrontierPolicy::SmallerFirst),
            other => Err(format!("unknown frontier policy `{other}` (expected larger|smaller)")),
        }
    }
}

/// A set of [`ClassKind`]s. Serializes as a list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct KindSet(u8);

impl KindSet {
    pub const EMPTY: KindSet = KindSet(0);

    pub fn contains(self, kind: ClassKind) -> bool {
        self.0 & Self::bit(kind) != 0
    }

    pub fn insert(&mut self, kind: ClassKind) {
        self.0 |= Self::bit(kind);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = ClassKind> {
        ClassKind::ALL.into_iter().filter(move |k| self.contains(*k))
    }

    fn bit(kind: ClassKind) -> u8 {
        1 << kind.to_byte()
    }
}

impl FromIterator<ClassKind> for KindSet {
    fn from_iter<I: IntoIterator<Item = ClassKind>>(iter: I) -> Self {
        let mut set = KindSet::EMPTY;
        for k in iter {
            set.insert(k);
        }
        set
    }
}

impl fmt::Debug for KindSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for KindSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for KindSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Vec::<ClassKind>::deserialize(d)?.into_iter().collect())
    }
}

fn default_postpone_kinds() -> KindSet {
    [ClassKind::Interface, ClassKind::Abstract].into_iter().collect()
}

fn default_delay() -> u32 {
    3
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    #[serde(default = "default_delay")]
    pub delay_steps: u32,
    #[serde(default)]
    pub probe_only: bool,
    #[serde(default = "default_postpone_kinds")]
    pub postpone_kinds: KindSet,
    #[serde(default)]
    pub frontier_policy: FrontierPolicy,
    /// Record a step-indexed event log in [`SearchResult::trace`].
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trace: bool,
}

impl SearchConfig {
    fn base(algorithm: Algorithm) -> Self {
        SearchConfig {
            algorithm,
            delay_steps: default_delay(),
            probe_only: false,
            postpone_kinds: default_postpone_kinds(),
            frontier_policy: FrontierPolicy::LargerFirst,
            trace: false,
        }
    }

    pub fn unidirectional() -> Self {
        Self::base(Algorithm::Unidirectional)
    }

    /// Postponement with a three-round delay.
    pub fn a1() -> Self {
        Self::base(Algorithm::BidirPostpone)
    }

    /// Postponement with a six-round delay.
    pub fn a2() -> Self {
        Self::base(Algorithm::BidirPostpone).with_delay(6)
    }

    /// Probes every backward node's class kind but never postpones.
    pub fn a3() -> Self {
        SearchConfig { probe_only: true, ..Self::base(Algorithm::BidirPostpone) }
    }

    /// Plain balanced bidirectional search.
    pub fn a4() -> Self {
        Self::base(Algorithm::BidirBalanced)
    }

    pub fn with_delay(mut self, delay_steps: u32) -> Self {
        self.delay_steps = delay_steps;
        self
    }

    pub fn with_policy(mut self, policy: FrontierPolicy) -> Self {
        self.frontier_policy = policy;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.probe_only && self.algorithm != Algorithm::BidirPostpone {
            return Err(SearchError::InvalidConfig("probe_only requires the bidir_postpone algorithm".into()));
        }
        Ok(())
    }

    /// Whether this configuration can hold nodes back. A zero-round hold or
    /// an empty kind set is no hold at all.
    pub fn postpones(&self) -> bool {
        self.algorithm == Algorithm::BidirPostpone
            && !self.probe_only
            && self.delay_steps > 0
            && !self.postpone_kinds.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    NoPath,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Found => "found",
            SearchStatus::NoPath => "no_path",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceAction {
    /// Neighbor relaxation ran for the node.
    Expanded,
    /// The postponement predicate fired; the node stays in its frontier.
    Postponed,
    /// A held node was skipped; `remaining` is its delay after the decrement.
    Waiting { remaining: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    /// 1-based frontier round.
    pub step: u32,
    pub direction: Direction,
    pub node: NodeId,
    pub action: TraceAction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub path: Vec<Edge>,
    pub length: usize,
    pub meeting_point: Option<NodeId>,
    /// Forward and backward distance of the meeting point when found.
    pub meeting_distances: Option<(u32, u32)>,
    pub visited_forward: usize,
    pub visited_backward: usize,
    pub postponements: usize,
    pub probe_count: usize,
    pub steps: usize,
    #[serde(rename = "elapsed_us", with = "duration_micros")]
    pub elapsed: Duration,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEvent>,
}

impl SearchResult {
    pub fn visited_total(&self) -> usize {
        self.visited_forward + self.visited_backward
    }

    /// A copy with the timing field zeroed, for comparing runs.
    pub fn without_timing(&self) -> SearchResult {
        SearchResult { elapsed: Duration::ZERO, ..self.clone() }
    }

    pub(crate) fn trivial(node: NodeId) -> SearchResult {
        SearchResult {
            status: SearchStatus::Found,
            path: Vec::new(),
            length: 0,
            meeting_point: Some(node),
            meeting_distances: Some((0, 0)),
            visited_forward: 0,
            visited_backward: 0,
            postponements: 0,
            probe_count: 0,
            steps: 0,
            elapsed: Duration::ZERO,
            trace: Vec::new(),
        }
    }
}

pub(crate) mod duration_micros {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_micros() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_micros)
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

pub fn bidir_balanced<G: CallGraph + ?Sized>(
    graph: &G,
    initial: NodeId,
    target: NodeId,
    frontier_policy: FrontierPolicy,
) -> Result<SearchResult, SearchError> {
    let config = SearchConfig::a4().with_policy(frontier_policy);
    BidirSearch::new(graph, initial, target, &config)?.run()
}

pub fn bidir_postpone<G: CallGraph + ?Sized>(
    graph: &G,
    initial: NodeId,
    target: NodeId,
    config: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    if config.algorithm != Algorithm::BidirPostpone {
        return Err(SearchError::InvalidConfig(format!("bidir_postpone called with algorithm {:?}", config.algorithm)));
    }
    BidirSearch::new(graph, initial, target, config)?.run()
}

/// Runs whichever algorithm `config` names.
pub fn search<G: CallGraph + ?Sized>(
    graph: &G,
    initial: NodeId,
    target: NodeId,
    config: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    config.validate()?;
    match config.algorithm {
        Algorithm::Unidirectional => unidirectional_shortest_path(graph, initial, target),
        Algorithm::BidirBalanced | Algorithm::BidirPostpone => BidirSearch::new(graph, initial, target, config)?.run(),
    }
}
