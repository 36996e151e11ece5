//! Failure-mode records, structured identifiers and the labeled graph
//! dataset built from fused features and an ingested edge list.

mod dataset;
mod edges;
mod id;
mod records;
mod split;

pub use dataset::{
    assemble, export, load_export, meta, GraphDataset, GraphMeta, Node, SPLIT_METHOD,
};
pub use edges::{ingest_edges, parse_edges, symmetrize, Edge};
pub use id::{format_id, label_names, parse_id, FailureModeId, CATEGORY_NAMES, SYSTEMS};
pub use records::{
    ingest_records, parse_records_csv, parse_records_jsonl, FailureRecord, IngestMode,
    IngestReport, RecordFormat, RowError, RECORD_FIELDS,
};
pub use split::{split_counts, stratified_split, Split, SplitSpec};
