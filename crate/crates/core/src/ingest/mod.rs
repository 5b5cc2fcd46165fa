//! Getting graphs in: the JSONL interchange format, the seeded synthetic
//! generator, and the reachability profile used to classify endpoint pairs.

mod jsonl;
mod reach;
mod synthetic;

pub use jsonl::{export_jsonl, export_jsonl_string, import_jsonl, import_jsonl_str, IngestError};
pub use reach::{classify_counts, classify_pair, reachable_count, PairProfile, Regime, DOMINANCE_RATIO, MANY_FRACTION};
pub use synthetic::{generate_synthetic, EdgeModel, SpecError, SyntheticGraph, SyntheticSpec};
