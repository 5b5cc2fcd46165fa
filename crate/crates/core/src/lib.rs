//! Call-path extraction over large call graphs.
//!
//! The crate provides a call-graph model with an in-memory backend
//! ([`graph::InMemoryGraph`]) and a disk-resident backend with access
//! accounting ([`store::DiskGraph`]), JSONL import and seeded synthetic
//! generation ([`ingest`]), unidirectional and bidirectional path searches
//! including the class-kind postponing variant ([`search`]), and a scenario
//! harness that runs algorithm variants over classified endpoint pairs
//! ([`bench`]).

pub mod bench;
pub mod graph;
pub mod ingest;
pub mod search;
pub mod store;

pub use graph::{CallGraph, ClassKind, Direction, Edge, GraphError, InMemoryGraph, MethodMeta, NodeId};
pub use search::{
    bidir_balanced, bidir_postpone, search, unidirectional_shortest_path, Algorithm, FrontierPolicy, SearchConfig,
    SearchError, SearchResult, SearchStatus,
};
pub use store::{build_store, open_store, AccessStats, CacheConfig, CacheMode, DiskGraph};
