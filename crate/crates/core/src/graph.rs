//! Call-graph data model and the in-memory backend.
//!
//! Nodes are methods, edges point from a caller to a callee. Every backend
//! implements [`CallGraph`], the access contract the search algorithms
//! consume: directional adjacency plus per-node metadata lookup.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense node index, assigned in import order starting at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Kind of the class enclosing a method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Interface,
    Abstract,
    Concrete,
}

impl ClassKind {
    pub const ALL: [ClassKind; 3] = [ClassKind::Interface, ClassKind::Abstract, ClassKind::Concrete];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassKind::Interface => "interface",
            ClassKind::Abstract => "abstract",
            ClassKind::Concrete => "concrete",
        }
    }

    pub(crate) fn to_byte(self) -> u8 {
        match self {
            ClassKind::Interface => 0,
            ClassKind::Abstract => 1,
            ClassKind::Concrete => 2,
        }
    }

    pub(crate) fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(ClassKind::Interface),
            1 => Some(ClassKind::Abstract),
            2 => Some(ClassKind::Concrete),
            _ => None,
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ClassKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interface" => Ok(ClassKind::Interface),
            "abstract" => Ok(ClassKind::Abstract),
            "concrete" => Ok(ClassKind::Concrete),
            other => Err(format!("unknown class kind `{other}`")),
        }
    }
}

/// Identity and source-code properties of one method.
///
/// `key` is the caller-provided unique id from the import stream; it is what
/// distinguishes overloads that share a qualified name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodMeta {
    pub node: NodeId,
    pub key: String,
    pub method_name: String,
    pub class_name: String,
    pub class_kind: ClassKind,
    #[serde(default)]
    pub file: String,
    #[serde(default)]
    pub line: u32,
}

impl MethodMeta {
    /// `ClassName.methodName`, the form accepted by [`CallGraph::resolve_name`].
    pub fn qualified_name(&self) -> String {
        format!("{}.{}", self.class_name, self.method_name)
    }
}

/// A directed call edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub caller: NodeId,
    pub callee: NodeId,
}

impl Edge {
    pub fn new(caller: NodeId, callee: NodeId) -> Self {
        Edge { caller, callee }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.caller, self.callee)
    }
}

/// Traversal direction over call edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Caller to callee.
    Forward,
    /// Callee to caller.
    Backward,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid node {node} (graph has {node_count} nodes)")]
    InvalidNode { node: NodeId, node_count: usize },
    #[error("no method named `{0}`")]
    NotFound(String),
    #[error("method name `{name}` is ambiguous: candidates {}", fmt_ids(.candidates))]
    Ambiguous { name: String, candidates: Vec<NodeId> },
    #[error("malformed qualified name `{0}` (expected ClassName.methodName)")]
    MalformedName(String),
    #[error("graph storage error: {0}")]
    Storage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_ids(ids: &[NodeId]) -> String {
    ids.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(", ")
}

/// Read access to a call graph.
///
/// Implementations must return adjacency sorted ascending and duplicate-free,
/// and must be deterministic across calls.
pub trait CallGraph {
    fn node_count(&self) -> usize;

    fn edge_count(&self) -> usize;

    /// Callees of `u`.
    fn successors(&self, u: NodeId) -> Result<Cow<'_, [NodeId]>, GraphError>;

    /// Callers of `u`.
    fn predecessors(&self, u: NodeId) -> Result<Cow<'_, [NodeId]>, GraphError>;

    fn method_meta(&self, u: NodeId) -> Result<MethodMeta, GraphError>;

    /// Class kind of `u`. This is the metadata probe the postponing search
    /// performs; disk backends account it as a metadata read.
    fn class_kind(&self, u: NodeId) -> Result<ClassKind, GraphError> {
        self.method_meta(u).map(|m| m.class_kind)
    }

    fn resolve_name(&self, qualified_name: &str) -> Result<NodeId, GraphError>;

    /// Called once when a search starts. Backends with per-query cache
    /// semantics reset their cache here.
    fn begin_query(&self) {}

    fn neighbors(&self, u: NodeId, direction: Direction) -> Result<Cow<'_, [NodeId]>, GraphError> {
        match direction {
            Direction::Forward => self.successors(u),
            Direction::Backward => self.predecessors(u),
        }
    }

    fn check_node(&self, u: NodeId) -> Result<(), GraphError> {
        if u.index() < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidNode { node: u, node_count: self.node_count() })
        }
    }
}

impl<G: CallGraph + ?Sized> CallGraph for &G {
    fn node_count(&self) -> usize {
        (**self).node_count()
    }
    fn edge_count(&self) -> usize {
        (**self).edge_count()
    }
    fn successors(&self, u: NodeId) -> Result<Cow<'_, [NodeId]>, GraphError> {
        (**self).successors(u)
    }
    fn predecessors(&self, u: NodeId) -> Result<Cow<'_, [NodeId]>, GraphError> {
        (**self).predecessors(u)
    }
    fn method_meta(&self, u: NodeId) -> Result<MethodMeta, GraphError> {
        (**self).method_meta(u)
    }
    fn class_kind(&self, u: NodeId) -> Result<ClassKind, GraphError> {
        (**self).class_kind(u)
    }
    fn resolve_name(&self, qualified_name: &str) -> Result<NodeId, GraphError> {
        (**self).resolve_name(qualified_name)
    }
    fn begin_query(&self) {
        (**self).begin_query()
    }
}

/// Splits `Class.method` at the last dot. Class names may themselves be
/// dotted (packages), method names may not.
pub(crate) fn split_qualified(name: &str) -> Result<(&str, &str), GraphError> {
    match name.rsplit_once('.') {
        Some((class, method)) if !class.is_empty() && !method.is_empty() => Ok((class, method)),
        _ => Err(GraphError::MalformedName(name.to_string())),
    }
}

pub(crate) fn lookup_name(index: &HashMap<String, Vec<NodeId>>, qualified_name: &str) -> Result<NodeId, GraphError> {
    split_qualified(qualified_name)?;
    match index.get(qualified_name).map(Vec::as_slice) {
        None | Some([]) => Err(GraphError::NotFound(qualified_name.to_string())),
        Some([only]) => Ok(*only),
        Some(many) => Err(GraphError::Ambiguous { name: qualified_name.to_string(), candidates: many.to_vec() }),
    }
}

/// Node description handed to [`GraphBuilder`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSpec {
    pub key: String,
    pub method_name: String,
    pub class_name: String,
    pub class_kind: ClassKind,
    pub file: String,
    pub line: u32,
}

impl NodeSpec {
    pub fn new(
        key: impl Into<String>,
        class_name: impl Into<String>,
        method_name: impl Into<String>,
        class_kind: ClassKind,
    ) -> Self {
        NodeSpec {
            key: key.into(),
            method_name: method_name.into(),
            class_name: class_name.into(),
            class_kind,
            file: String::new(),
            line: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("duplicate node id `{0}`")]
    DuplicateKey(String),
    #[error("node `{0}` has an empty method or class name")]
    EmptyName(String),
    #[error("edge endpoint {0} does not exist")]
    UnknownEndpoint(NodeId),
    #[error("graph exceeds {} nodes", u32::MAX)]
    TooManyNodes,
}

/// Incremental constructor for [`InMemoryGraph`].
#[derive(Default)]
pub struct GraphBuilder {
    nodes: Vec<MethodMeta>,
    keys: HashMap<String, NodeId>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, spec: NodeSpec) -> Result<NodeId, BuildError> {
        if spec.method_name.is_empty() || spec.class_name.is_empty() {
            return Err(BuildError::EmptyName(spec.key));
        }
        if self.keys.contains_key(&spec.key) {
            return Err(BuildError::DuplicateKey(spec.key));
        }
        let id = u32::try_from(self.nodes.len()).map_err(|_| BuildError::TooManyNodes)?;
        let node = NodeId(id);
        self.keys.insert(spec.key.clone(), node);
        self.nodes.push(MethodMeta {
            node,
            key: spec.key,
            method_name: spec.method_name,
            class_name: spec.class_name,
            class_kind: spec.class_kind,
            file: spec.file,
            line: spec.line,
        });
        Ok(node)
    }

    pub fn node_by_key(&self, key: &str) -> Option<NodeId> {
        self.keys.get(key).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Duplicate edges are accepted and collapsed at [`GraphBuilder::build`].
    pub fn add_edge(&mut self, caller: NodeId, callee: NodeId) -> Result<(), BuildError> {
        for end in [caller, callee] {
            if end.index() >= self.nodes.len() {
                return Err(BuildError::UnknownEndpoint(end));
            }
        }
        self.edges.push(Edge::new(caller, callee));
        Ok(())
    }

    pub fn build(self) -> InMemoryGraph {
        let n = self.nodes.len();
        let mut forward = vec![Vec::new(); n];
        let mut backward = vec![Vec::new(); n];
        for e in &self.edges {
            forward[e.caller.index()].push(e.callee);
            backward[e.callee.index()].push(e.caller);
        }
        let mut edge_count = 0;
        for adj in forward.iter_mut() {
            adj.sort_unstable();
            adj.dedup();
            edge_count += adj.len();
        }
        for adj in backward.iter_mut() {
            adj.sort_unstable();
            adj.dedup();
        }
        let mut name_index: HashMap<String, Vec<NodeId>> = HashMap::new();
        for m in &self.nodes {
            name_index.entry(m.qualified_name()).or_default().push(m.node);
        }
        InMemoryGraph { nodes: self.nodes, forward, backward, name_index, key_index: self.keys, edge_count }
    }
}

/// Fully materialized call graph.
#[derive(Clone, Debug)]
pub struct InMemoryGraph {
    nodes: Vec<MethodMeta>,
    forward: Vec<Vec<NodeId>>,
    backward: Vec<Vec<NodeId>>,
    name_index: HashMap<String, Vec<NodeId>>,
    key_index: HashMap<String, NodeId>,
    edge_count: usize,
}

impl InMemoryGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    pub fn nodes(&self) -> &[MethodMeta] {
        &self.nodes
    }

    pub fn node_by_key(&self, key: &str) -> Option<NodeId> {
        self.key_index.get(key).copied()
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.forward[u.index()].len()
    }

    pub fn in_degree(&self, u: NodeId) -> usize {
        self.backward[u.index()].len()
    }

    /// All edges ordered by (caller, callee).
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.forward.iter().enumerate().flat_map(|(u, adj)| adj.iter().map(move |&v| Edge::new(NodeId(u as u32), v)))
    }

    pub fn has_edge(&self, caller: NodeId, callee: NodeId) -> bool {
        self.forward.get(caller.index()).is_some_and(|adj| adj.binary_search(&callee).is_ok())
    }

    /// Copies any graph backend into memory.
    pub fn from_graph<G: CallGraph + ?Sized>(graph: &G) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::new();
        for i in 0..graph.node_count() {
            let m = graph.method_meta(NodeId(i as u32))?;
            builder
                .add_node(NodeSpec {
                    key: m.key,
                    method_name: m.method_name,
                    class_name: m.class_name,
                    class_kind: m.class_kind,
                    file: m.file,
                    line: m.line,
                })
                .map_err(|e| GraphError::Storage(e.to_string()))?;
        }
        for i in 0..graph.node_count() {
            let u = NodeId(i as u32);
            for &v in graph.successors(u)?.iter() {
                builder.add_edge(u, v).map_err(|e| GraphError::Storage(e.to_string()))?;
            }
        }
        Ok(builder.build())
    }
}

impl CallGraph for InMemoryGraph {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn successors(&self, u: NodeId) -> Result<Cow<'_, [NodeId]>, GraphError> {
        self.check_node(u)?;
        Ok(Cow::Borrowed(&self.forward[u.index()]))
    }

    fn predecessors(&self, u: NodeId) -> Result<Cow<'_, [NodeId]>, GraphError> {
        self.check_node(u)?;
        Ok(Cow::Borrowed(&self.backward[u.index()]))
    }

    fn method_meta(&self, u: NodeId) -> Result<MethodMeta, GraphError> {
        self.check_node(u)?;
        Ok(self.nodes[u.index()].clone())
    }

    fn class_kind(&self, u: NodeId) -> Result<ClassKind, GraphError> {
        self.check_node(u)?;
        Ok(self.nodes[u.index()].class_kind)
    }

    fn resolve_name(&self, qualified_name: &str) -> Result<NodeId, GraphError> {
        lookup_name(&self.name_index, qualified_name)
    }
}

/// The four-method example: `Tranceiver.transmit` calls `Transformer.encode`,
/// `Protocol.makeHeader` and `Tranceiver.send`.
pub fn transceiver_example() -> InMemoryGraph {
    let mut b = GraphBuilder::new();
    let transmit = b.add_node(NodeSpec::new("transmit", "Tranceiver", "transmit", ClassKind::Concrete)).unwrap();
    let encode = b.add_node(NodeSpec::new("encode", "Transformer", "encode", ClassKind::Concrete)).unwrap();
    let header = b.add_node(NodeSpec::new("makeHeader", "Protocol", "makeHeader", ClassKind::Concrete)).unwrap();
    let send = b.add_node(NodeSpec::new("send", "Tranceiver", "send", ClassKind::Concrete)).unwrap();
    for callee in [encode, header, send] {
        b.add_edge(transmit, callee).unwrap();
    }
    b.build()
}
