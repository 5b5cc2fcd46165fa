//! Line-oriented JSON interchange format.
//!
//! One record per line:
//!
//! ```text
//! {"record":"node","id":"n0","method":"transmit","class":"Tranceiver","kind":"concrete","file":"Tranceiver.java","line":7}
//! {"record":"edge","caller":"n0","callee":"n1"}
//! ```
//!
//! `file` and `line` are optional. A missing `kind` defaults to `concrete`
//! with a warning. Ids may be JSON strings or non-negative integers; they are
//! kept as strings and exported as strings. Blank lines are ignored.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::graph::{BuildError, CallGraph, ClassKind, GraphBuilder, InMemoryGraph, NodeId, NodeSpec};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: edge references id `{id}` before its node record")]
    ForwardReference { line: usize, id: String },
    #[error("line {line}: duplicate node id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: {source}")]
    Build { line: usize, source: BuildError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "record", rename_all = "lowercase")]
enum Record {
    Node {
        #[serde(deserialize_with = "id_from_json")]
        id: String,
        method: String,
        class: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kind: Option<ClassKind>,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        file: String,
        #[serde(default, skip_serializing_if = "is_zero")]
        line: u32,
    },
    Edge {
        #[serde(deserialize_with = "id_from_json")]
        caller: String,
        #[serde(deserialize_with = "id_from_json")]
        callee: String,
    },
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

fn id_from_json<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum RawId {
        Text(String),
        Number(u64),
    }
    Ok(match RawId::deserialize(d)? {
        RawId::Text(s) => s,
        RawId::Number(n) => n.to_string(),
    })
}

/// Parses a JSONL stream into a graph. NodeIds follow node-record order.
pub fn import_jsonl<R: BufRead>(reader: R) -> Result<InMemoryGraph, IngestError> {
    let mut builder = GraphBuilder::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(text).map_err(|e| IngestError::Malformed { line: line_no, message: e.to_string() })?;
        match record {
            Record::Node { id, method, class, kind, file, line } => {
                if builder.node_by_key(&id).is_some() {
                    return Err(IngestError::DuplicateId { line: line_no, id });
                }
                let class_kind = kind.unwrap_or_else(|| {
                    log::warn!("line {line_no}: node `{id}` has no kind, assuming concrete");
                    ClassKind::Concrete
                });
                builder
                    .add_node(NodeSpec { key: id, method_name: method, class_name: class, class_kind, file, line })
                    .map_err(|source| IngestError::Build { line: line_no, source })?;
            }
            Record::Edge { caller, callee } => {
                let resolve =
                    |id: String| builder.node_by_key(&id).ok_or(IngestError::ForwardReference { line: line_no, id });
                let caller = resolve(caller)?;
                let callee = resolve(callee)?;
                builder.add_edge(caller, callee).map_err(|source| IngestError::Build { line: line_no, source })?;
            }
        }
    }
    Ok(builder.build())
}

pub fn import_jsonl_str(text: &str) -> Result<InMemoryGraph, IngestError> {
    import_jsonl(text.as_bytes())
}

/// Writes nodes in NodeId order, then edges sorted by (caller, callee).
pub fn export_jsonl<G: CallGraph + ?Sized, W: Write>(graph: &G, mut out: W) -> Result<(), IngestError> {
    let n = graph.node_count();
    let mut keys = Vec::with_capacity(n);
    for i in 0..n {
        let m = graph.method_meta(NodeId(i as u32)).map_err(io_err)?;
        keys.push(m.key.clone());
        let rec = Record::Node {
            id: m.key,
            method: m.method_name,
            class: m.class_name,
            kind: Some(m.class_kind),
            file: m.file,
            line: m.line,
        };
        serde_json::to_writer(&mut out, &rec).map_err(|e| IngestError::Io(e.into()))?;
        out.write_all(b"\n")?;
    }
    for (u, caller) in keys.iter().enumerate() {
        for &v in graph.successors(NodeId(u as u32)).map_err(io_err)?.iter() {
            let rec = Record::Edge { caller: caller.clone(), callee: keys[v.index()].clone() };
            serde_json::to_writer(&mut out, &rec).map_err(|e| IngestError::Io(e.into()))?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn export_jsonl_string<G: CallGraph + ?Sized>(graph: &G) -> Result<String, IngestError> {
    let mut buf = Vec::new();
    export_jsonl(graph, &mut buf)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn io_err(e: crate::graph::GraphError) -> IngestError {
    match e {
        crate::graph::GraphError::Io(io) => IngestError::Io(io),
        other => IngestError::Io(io::Error::other(other.to_string())),
    }
}
