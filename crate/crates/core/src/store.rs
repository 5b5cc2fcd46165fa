//! Disk-resident graph backend.
//!
//! A `CGS1` store file holds one graph, laid out in this order:
//!
//! | part              | contents                                                        |
//! |-------------------|-----------------------------------------------------------------|
//! | header (88 bytes) | magic `CGS1`, version, node_count, edge_count, section table     |
//! | meta index        | `node_count` fixed 24-byte records                               |
//! | string heap       | length-prefixed UTF-8 strings (`u32` length, then bytes)         |
//! | forward adjacency | `node_count + 1` run offsets (`u64`), then callee ids (`u32`)    |
//! | backward adjacency| same layout, caller ids                                         |
//! | trailer (24 bytes)| CRC32 of header, meta, heap, forward, backward; magic `CGSE`    |
//!
//! All integers are little-endian. The header is
//! `magic[4] version:u32 node_count:u32 reserved:u32 edge_count:u64`
//! followed by four `(offset:u64, len:u64)` pairs for the sections above.
//! A meta record is
//! `kind:u8 pad[3] line:u32 key:u32 method:u32 class:u32 file:u32`, where
//! the four string fields are byte offsets into the heap and `kind` is
//! 0 = interface, 1 = abstract, 2 = concrete.
//!
//! Run offsets count node ids, not bytes: the neighbors of node `u` are ids
//! `offsets[u]..offsets[u + 1]` of the run area. Runs are sorted ascending.
//!
//! A [`DiskGraph`] handle verifies every checksum on open, keeps only the
//! header and a name index resident, and fetches metadata and adjacency on
//! demand through bounded LRU caches, one each for metadata, forward runs
//! and backward runs. Every request is counted in
//! [`AccessStats`] and every miss can be charged an injected latency.

use std::borrow::Cow;
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::rc::Rc;
use std::time::Duration;

use lru::LruCache;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{lookup_name, CallGraph, ClassKind, GraphError, MethodMeta, NodeId};

pub const MAGIC: [u8; 4] = *b"CGS1";
pub const TRAILER_MAGIC: [u8; 4] = *b"CGSE";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: u64 = 88;
const META_RECORD_LEN: u64 = 24;
const TRAILER_LEN: u64 = 24;

/// Named parts of a store file, used in integrity errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Header,
    MetaIndex,
    StringHeap,
    ForwardAdjacency,
    BackwardAdjacency,
    Trailer,
}

impl Section {
    const BODY: [Section; 4] =
        [Section::MetaIndex, Section::StringHeap, Section::ForwardAdjacency, Section::BackwardAdjacency];
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Header => "header",
            Section::MetaIndex => "meta index",
            Section::StringHeap => "string heap",
            Section::ForwardAdjacency => "forward adjacency",
            Section::BackwardAdjacency => "backward adjacency",
            Section::Trailer => "checksum trailer",
        })
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: not a call-graph store (bad magic)")]
    BadMagic { path: PathBuf },
    #[error("{path}: unsupported store version {found} (expected {FORMAT_VERSION})")]
    Version { path: PathBuf, found: u32 },
    #[error("{path}: checksum failure in {section}: {reason}")]
    Checksum { path: PathBuf, section: Section, reason: String },
    #[error("{path}: corrupt store: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("graph exceeds store format limits: {0}")]
    TooLarge(String),
    #[error("cache must hold at least one node")]
    EmptyCache,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl StoreError {
    /// The section an integrity failure was detected in, if any.
    pub fn damaged_section(&self) -> Option<Section> {
        match self {
            StoreError::Checksum { section, .. } => Some(*section),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CacheMode {
    /// The cache is emptied whenever a search begins.
    #[default]
    ColdPerQuery,
    WarmAcrossQueries,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheConfig {
    pub max_cached_nodes: usize,
    #[serde(rename = "latency_us", with = "micros", default)]
    pub latency_per_miss: Duration,
    #[serde(default)]
    pub mode: CacheMode,
}

impl Default for CacheConfig {
    fn default() -> Self {
        CacheConfig { max_cached_nodes: 4096, latency_per_miss: Duration::ZERO, mode: CacheMode::ColdPerQuery }
    }
}

impl CacheConfig {
    pub fn with_latency(mut self, latency: Duration) -> Self {
        self.latency_per_miss = latency;
        self
    }

    pub fn with_capacity(mut self, max_cached_nodes: usize) -> Self {
        self.max_cached_nodes = max_cached_nodes;
        self
    }
}

mod micros {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_micros() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_micros)
    }
}

/// Read accounting for one handle. `cache_hits + cache_misses` always equals
/// `meta_reads + adjacency_reads`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessStats {
    pub meta_reads: u64,
    pub adjacency_reads: u64,
    pub cache_hits: u64,
    pub cache_misses: u64,
    #[serde(rename = "injected_latency_us", with = "micros")]
    pub injected_latency_total: Duration,
}

impl AccessStats {
    pub fn is_consistent(&self) -> bool {
        self.cache_hits + self.cache_misses == self.meta_reads + self.adjacency_reads
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StoreSummary {
    pub node_count: usize,
    pub edge_count: usize,
    pub byte_size: u64,
}

#[derive(Clone, Copy, Debug)]
struct Header {
    node_count: u32,
    edge_count: u64,
    sections: [(u64, u64); 4],
}

impl Header {
    fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(HEADER_LEN as usize);
        buf.extend_from_slice(&MAGIC);
        buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        buf.extend_from_slice(&self.node_count.to_le_bytes());
        buf.extend_from_slice(&0u32.to_le_bytes());
        buf.extend_from_slice(&self.edge_count.to_le_bytes());
        for (off, len) in self.sections {
            buf.extend_from_slice(&off.to_le_bytes());
            buf.extend_from_slice(&len.to_le_bytes());
        }
        debug_assert_eq!(buf.len() as u64, HEADER_LEN);
        buf
    }

    fn section(&self, s: Section) -> (u64, u64) {
        match s {
            Section::MetaIndex => self.sections[0],
            Section::StringHeap => self.sections[1],
            Section::ForwardAdjacency => self.sections[2],
            Section::BackwardAdjacency => self.sections[3],
            Section::Header => (0, HEADER_LEN),
            Section::Trailer => (self.body_end(), TRAILER_LEN),
        }
    }

    fn body_end(&self) -> u64 {
        let (off, len) = self.sections[3];
        off + len
    }
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn u64_at(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

fn adjacency_section<G: CallGraph + ?Sized>(graph: &G, backward: bool) -> Result<Vec<u8>, StoreError> {
    let n = graph.node_count();
    let mut offsets = Vec::with_capacity(8 * (n + 1));
    let mut runs = Vec::new();
    let mut total: u64 = 0;
    for i in 0..n {
        offsets.extend_from_slice(&total.to_le_bytes());
        let u = NodeId(i as u32);
        let adj = if backward { graph.predecessors(u)? } else { graph.successors(u)? };
        for v in adj.iter() {
            runs.extend_from_slice(&v.0.to_le_bytes());
        }
        total += adj.len() as u64;
    }
    offsets.extend_from_slice(&total.to_le_bytes());
    offsets.extend_from_slice(&runs);
    Ok(offsets)
}

/// Serializes any graph backend to a store file at `output`.
pub fn build_store<G: CallGraph + ?Sized>(graph: &G, output: &Path) -> Result<StoreSummary, StoreError> {
    let n = graph.node_count();
    let node_count = u32::try_from(n).map_err(|_| StoreError::TooLarge(format!("{n} nodes (limit {})", u32::MAX)))?;

    let mut meta = Vec::with_capacity(n * META_RECORD_LEN as usize);
    let mut heap = Vec::new();
    let intern = |s: &str, heap: &mut Vec<u8>| -> Result<u32, StoreError> {
        let off = u32::try_from(heap.len()).map_err(|_| StoreError::TooLarge("string heap over 4 GiB".into()))?;
        let len = u32::try_from(s.len()).map_err(|_| StoreError::TooLarge("string over 4 GiB".into()))?;
        heap.extend_from_slice(&len.to_le_bytes());
        heap.extend_from_slice(s.as_bytes());
        Ok(off)
    };
    for i in 0..n {
        let m = graph.method_meta(NodeId(i as u32))?;
        meta.push(m.class_kind.to_byte());
        meta.extend_from_slice(&[0u8; 3]);
        meta.extend_from_slice(&m.line.to_le_bytes());
        for s in [&m.key, &m.method_name, &m.class_name, &m.file] {
            let off = intern(s, &mut heap)?;
            meta.extend_from_slice(&off.to_le_bytes());
        }
    }
    let forward = adjacency_section(graph, false)?;
    let backward = adjacency_section(graph, true)?;

    let mut sections = [(0u64, 0u64); 4];
    let mut cursor = HEADER_LEN;
    for (slot, body) in sections.iter_mut().zip([&meta, &heap, &forward, &backward]) {
        *slot = (cursor, body.len() as u64);
        cursor += body.len() as u64;
    }
    let header = Header { node_count, edge_count: graph.edge_count() as u64, sections };
    let header_bytes = header.encode();

    let io_err = |source| StoreError::Io { path: output.to_path_buf(), source };
    let file = File::create(output).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    let mut trailer = Vec::with_capacity(TRAILER_LEN as usize);
    for part in [&header_bytes, &meta, &heap, &forward, &backward] {
        out.write_all(part).map_err(io_err)?;
        trailer.extend_from_slice(&crc32fast::hash(part).to_le_bytes());
    }
    trailer.extend_from_slice(&TRAILER_MAGIC);
    out.write_all(&trailer).map_err(io_err)?;
    out.flush().map_err(io_err)?;

    Ok(StoreSummary { node_count: n, edge_count: graph.edge_count(), byte_size: cursor + TRAILER_LEN })
}

struct Inner {
    reader: BufReader<File>,
    meta: LruCache<NodeId, Rc<MethodMeta>>,
    forward: LruCache<NodeId, Rc<[NodeId]>>,
    backward: LruCache<NodeId, Rc<[NodeId]>>,
    stats: AccessStats,
}

/// Handle on an opened store file. See the module docs for the accounting
/// model. A handle serves one query at a time; open several handles for
/// concurrent use.
pub struct DiskGraph {
    path: PathBuf,
    header: Header,
    config: CacheConfig,
    name_index: HashMap<String, Vec<NodeId>>,
    inner: RefCell<Inner>,
}

pub fn open_store(path: &Path, cache: CacheConfig) -> Result<DiskGraph, StoreError> {
    DiskGraph::open(path, cache)
}

impl DiskGraph {
    pub fn open(path: &Path, cache: CacheConfig) -> Result<Self, StoreError> {
        let capacity = NonZeroUsize::new(cache.max_cached_nodes).ok_or(StoreError::EmptyCache)?;
        let io_err = |source| StoreError::Io { path: path.to_path_buf(), source };
        let checksum = |section, reason: &str| StoreError::Checksum {
            path: path.to_path_buf(),
            section,
            reason: reason.to_string(),
        };
        let corrupt = |reason: String| StoreError::Corrupt { path: path.to_path_buf(), reason };

        let mut file = File::open(path).map_err(io_err)?;
        let file_len = file.metadata().map_err(io_err)?.len();

        let mut head = vec![0u8; HEADER_LEN as usize];
        if file_len < 4 {
            return Err(checksum(Section::Header, "file truncated"));
        }
        let got = read_up_to(&mut file, &mut head).map_err(io_err)?;
        if head[..4] != MAGIC {
            return Err(StoreError::BadMagic { path: path.to_path_buf() });
        }
        if got < HEADER_LEN as usize {
            return Err(checksum(Section::Header, "file truncated"));
        }
        let version = u32_at(&head, 4);
        if version != FORMAT_VERSION {
            return Err(StoreError::Version { path: path.to_path_buf(), found: version });
        }
        let mut sections = [(0u64, 0u64); 4];
        for (i, slot) in sections.iter_mut().enumerate() {
            *slot = (u64_at(&head, 24 + 16 * i), u64_at(&head, 32 + 16 * i));
        }
        let header = Header { node_count: u32_at(&head, 8), edge_count: u64_at(&head, 16), sections };

        let n = header.node_count as u64;
        let expected_len = [
            n * META_RECORD_LEN,
            header.sections[1].1,
            8 * (n + 1) + 4 * header.edge_count,
            8 * (n + 1) + 4 * header.edge_count,
        ];
        let mut cursor = HEADER_LEN;
        for (i, section) in Section::BODY.iter().enumerate() {
            let (off, len) = header.sections[i];
            if off != cursor || len != expected_len[i] {
                return Err(checksum(*section, "section table does not match header counts"));
            }
            if off + len > file_len {
                return Err(checksum(*section, "file truncated"));
            }
            cursor += len;
        }
        if cursor + TRAILER_LEN > file_len {
            return Err(checksum(Section::Trailer, "file truncated"));
        }
        if cursor + TRAILER_LEN < file_len {
            return Err(corrupt(format!("{} trailing bytes after trailer", file_len - cursor - TRAILER_LEN)));
        }

        let mut trailer = [0u8; TRAILER_LEN as usize];
        file.seek(SeekFrom::Start(cursor)).map_err(io_err)?;
        file.read_exact(&mut trailer).map_err(io_err)?;
        if trailer[20..] != TRAILER_MAGIC {
            return Err(checksum(Section::Trailer, "bad trailer magic"));
        }
        if crc32fast::hash(&head) != u32_at(&trailer, 0) {
            return Err(checksum(Section::Header, "crc mismatch"));
        }

        // Verify the body. The meta index and heap are also needed to build
        // the resident name index, so keep those two around until the end
        // of open.
        file.seek(SeekFrom::Start(HEADER_LEN)).map_err(io_err)?;
        let mut reader = BufReader::new(file);
        let mut meta_bytes = Vec::new();
        let mut heap_bytes = Vec::new();
        for (i, section) in Section::BODY.iter().enumerate() {
            let len = header.sections[i].1;
            let crc = match section {
                Section::MetaIndex => read_section(&mut reader, len, Some(&mut meta_bytes)),
                Section::StringHeap => read_section(&mut reader, len, Some(&mut heap_bytes)),
                _ => read_section(&mut reader, len, None),
            }
            .map_err(io_err)?;
            if crc != u32_at(&trailer, 4 + 4 * i) {
                return Err(checksum(*section, "crc mismatch"));
            }
        }

        let mut name_index: HashMap<String, Vec<NodeId>> = HashMap::new();
        for i in 0..header.node_count as usize {
            let rec = &meta_bytes[i * META_RECORD_LEN as usize..(i + 1) * META_RECORD_LEN as usize];
            let method = heap_str(&heap_bytes, u32_at(rec, 12)).map_err(corrupt)?;
            let class = heap_str(&heap_bytes, u32_at(rec, 16)).map_err(corrupt)?;
            name_index.entry(format!("{class}.{method}")).or_default().push(NodeId(i as u32));
        }

        Ok(DiskGraph {
            path: path.to_path_buf(),
            header,
            config: cache,
            name_index,
            inner: RefCell::new(Inner {
                reader,
                meta: LruCache::new(capacity),
                forward: LruCache::new(capacity),
                backward: LruCache::new(capacity),
                stats: AccessStats::default(),
            }),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn cache_config(&self) -> &CacheConfig {
        &self.config
    }

    pub fn access_stats(&self) -> AccessStats {
        self.inner.borrow().stats
    }

    pub fn reset_stats(&self) {
        self.inner.borrow_mut().stats = AccessStats::default();
    }

    pub fn clear_cache(&self) {
        let mut inner = self.inner.borrow_mut();
        inner.meta.clear();
        inner.forward.clear();
        inner.backward.clear();
    }

    fn corrupt(&self, reason: String) -> GraphError {
        GraphError::Storage(format!("{}: {reason}", self.path.display()))
    }

    fn charge_miss(&self, stats: &mut AccessStats) {
        stats.cache_misses += 1;
        if !self.config.latency_per_miss.is_zero() {
            std::thread::sleep(self.config.latency_per_miss);
            stats.injected_latency_total += self.config.latency_per_miss;
        }
    }

    fn fetch_meta(&self, u: NodeId) -> Result<Rc<MethodMeta>, GraphError> {
        self.check_node(u)?;
        let mut guard = self.inner.borrow_mut();
        let inner = &mut *guard;
        inner.stats.meta_reads += 1;
        if let Some(hit) = inner.meta.get(&u) {
            inner.stats.cache_hits += 1;
            return Ok(Rc::clone(hit));
        }
        self.charge_miss(&mut inner.stats);

        let (meta_off, _) = self.header.section(Section::MetaIndex);
        let (heap_off, heap_len) = self.header.section(Section::StringHeap);
        let mut rec = [0u8; META_RECORD_LEN as usize];
        inner.reader.seek(SeekFrom::Start(meta_off + META_RECORD_LEN * u.0 as u64))?;
        inner.reader.read_exact(&mut rec)?;
        let class_kind = ClassKind::from_byte(rec[0])
            .ok_or_else(|| self.corrupt(format!("node {u} has invalid class kind byte {}", rec[0])))?;
        let mut strings: [String; 4] = Default::default();
        for (slot, field) in strings.iter_mut().zip([8, 12, 16, 20]) {
            let off = u32_at(&rec, field) as u64;
            if off + 4 > heap_len {
                return Err(self.corrupt(format!("string offset {off} outside heap")));
            }
            inner.reader.seek(SeekFrom::Start(heap_off + off))?;
            let mut len = [0u8; 4];
            inner.reader.read_exact(&mut len)?;
            let len = u32::from_le_bytes(len) as u64;
            if off + 4 + len > heap_len {
                return Err(self.corrupt(format!("string at {off} overruns heap")));
            }
            let mut bytes = vec![0u8; len as usize];
            inner.reader.read_exact(&mut bytes)?;
            *slot = String::from_utf8(bytes).map_err(|_| self.corrupt(format!("string at {off} is not UTF-8")))?;
        }
        let [key, method_name, class_name, file] = strings;
        let meta =
            Rc::new(MethodMeta { node: u, key, method_name, class_name, class_kind, file, line: u32_at(&rec, 4) });
        inner.meta.put(u, Rc::clone(&meta));
        Ok(meta)
    }

    fn fetch_adjacency(&self, u: NodeId, backward: bool) -> Result<Rc<[NodeId]>, GraphError> {
        self.check_node(u)?;
        let mut guard = self.inner.borrow_mut();
        let inner = &mut *guard;
        inner.stats.adjacency_reads += 1;
        let cache = if backward { &mut inner.backward } else { &mut inner.forward };
        if let Some(hit) = cache.get(&u) {
            let hit = Rc::clone(hit);
            inner.stats.cache_hits += 1;
            return Ok(hit);
        }
        self.charge_miss(&mut inner.stats);

        let section = if backward { Section::BackwardAdjacency } else { Section::ForwardAdjacency };
        let (off, _) = self.header.section(section);
        let n = self.header.node_count as u64;
        let mut bounds = [0u8; 16];
        inner.reader.seek(SeekFrom::Start(off + 8 * u.0 as u64))?;
        inner.reader.read_exact(&mut bounds)?;
        let (start, end) = (u64_at(&bounds, 0), u64_at(&bounds, 8));
        if start > end || end > self.header.edge_count {
            return Err(self.corrupt(format!("{section} offsets for node {u} are not monotone")));
        }
        let runs_off = off + 8 * (n + 1);
        let mut raw = vec![0u8; 4 * (end - start) as usize];
        inner.reader.seek(SeekFrom::Start(runs_off + 4 * start))?;
        inner.reader.read_exact(&mut raw)?;
        let ids: Vec<NodeId> = raw.chunks_exact(4).map(|c| NodeId(u32_at(c, 0))).collect();
        if ids.iter().any(|v| v.0 as u64 >= n) || ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(self.corrupt(format!("{section} run for node {u} is out of range or unsorted")));
        }
        let ids: Rc<[NodeId]> = ids.into();
        let cache = if backward { &mut inner.backward } else { &mut inner.forward };
        cache.put(u, Rc::clone(&ids));
        Ok(ids)
    }
}

impl CallGraph for DiskGraph {
    fn node_count(&self) -> usize {
        self.header.node_count as usize
    }

    fn edge_count(&self) -> usize {
        self.header.edge_count as usize
    }

    fn successors(&self, u: NodeId) -> Result<Cow<'_, [NodeId]>, GraphError> {
        Ok(Cow::Owned(self.fetch_adjacency(u, false)?.to_vec()))
    }

    fn predecessors(&self, u: NodeId) -> Result<Cow<'_, [NodeId]>, GraphError> {
        Ok(Cow::Owned(self.fetch_adjacency(u, true)?.to_vec()))
    }

    fn method_meta(&self, u: NodeId) -> Result<MethodMeta, GraphError> {
        Ok((*self.fetch_meta(u)?).clone())
    }

    fn class_kind(&self, u: NodeId) -> Result<ClassKind, GraphError> {
        Ok(self.fetch_meta(u)?.class_kind)
    }

    fn resolve_name(&self, qualified_name: &str) -> Result<NodeId, GraphError> {
        lookup_name(&self.name_index, qualified_name)
    }

    fn begin_query(&self) {
        if self.config.mode == CacheMode::ColdPerQuery {
            self.clear_cache();
        }
    }
}

fn read_up_to(file: &mut File, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match file.read(&mut buf[filled..])? {
            0 => break,
            k => filled += k,
        }
    }
    Ok(filled)
}

fn read_section<R: Read>(reader: &mut R, len: u64, mut keep: Option<&mut Vec<u8>>) -> io::Result<u32> {
    let mut hasher = crc32fast::Hasher::new();
    let mut remaining = len;
    let mut chunk = vec![0u8; 64 * 1024];
    while remaining > 0 {
        let take = remaining.min(chunk.len() as u64) as usize;
        reader.read_exact(&mut chunk[..take])?;
        hasher.update(&chunk[..take]);
        if let Some(buf) = keep.as_deref_mut() {
            buf.extend_from_slice(&chunk[..take]);
        }
        remaining -= take as u64;
    }
    Ok(hasher.finalize())
}

fn heap_str(heap: &[u8], off: u32) -> Result<String, String> {
    let off = off as usize;
    let len = heap
        .get(off..off + 4)
        .map(|b| u32_at(b, 0) as usize)
        .ok_or_else(|| format!("string offset {off} outside heap"))?;
    let bytes = heap.get(off + 4..off + 4 + len).ok_or_else(|| format!("string at {off} overruns heap"))?;
    String::from_utf8(bytes.to_vec()).map_err(|_| format!("string at {off} is not UTF-8"))
}
