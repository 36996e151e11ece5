//! One module per group of pipeline stages. Every stage reads its inputs
//! through a [`Stage`], writes stamped artifacts under the output directory
//! and finishes with a manifest.

mod corpus;
mod dataset;
mod embed;
mod fuse;
mod report;

use fgf_core::graphset::{ingest_records, FailureRecord};
use fgf_core::keywords::KeywordTaxonomy;

use crate::artifacts::Stage;
use crate::failure::Failure;

pub use corpus::{evaluate, fetch, optimize};
pub use dataset::{build_graph, validate};
pub use embed::embed;
pub use fuse::fuse;
pub use report::report;

/// Artifact paths relative to the output directory.
pub mod paths {
    pub const CORPUS: &str = "corpus/corpus.jsonl";
    pub const FETCH_REPORT: &str = "corpus/fetch_report.json";
    pub const METRICS: &str = "metrics/metrics.json";
    pub const TOKENS: &str = "embed/tokens.emb";
    pub const VERBS: &str = "embed/verb.emb";
    pub const EMBED_REPORT: &str = "embed/embed_report.json";
    pub const SWEEP: &str = "embed/sweep.json";
    pub const FUSED: &str = "fuse/fused.emb";
    pub const FUSE_REPORT: &str = "fuse/fuse_report.json";
    pub const FUSE_WEIGHTS: &str = "fuse/weights.json";
    pub const GRAPH_DIR: &str = "graph";
    pub const BUILD_REPORT: &str = "graph/build_report.json";
    pub const VALIDATE_REPORT: &str = "validate/validate.json";
    pub const DISTANCES: &str = "validate/centroid_distances.csv";
    pub const SUMMARY_JSON: &str = "report/summary.json";
    pub const SUMMARY_MD: &str = "report/summary.md";

    pub fn run(algo: &str) -> String {
        format!("runs/{algo}.json")
    }

    pub fn field(name: &str) -> String {
        format!("embed/{name}.emb")
    }
}

fn taxonomy(stage: &mut Stage<'_>) -> Result<KeywordTaxonomy, Failure> {
    match &stage.loaded.config.corpus.taxonomy {
        Some(p) => {
            let path = stage.input(&stage.loaded.resolve(p))?;
            Ok(KeywordTaxonomy::load(path)?)
        }
        None => Ok(KeywordTaxonomy::default_table()),
    }
}

fn records(stage: &mut Stage<'_>) -> Result<Vec<FailureRecord>, Failure> {
    let p = stage.loaded.config.records.path.clone().ok_or_else(|| {
        Failure::config(format!("`{}` needs records.path in the config", stage.name))
    })?;
    let path = stage.input(&stage.loaded.resolve(&p))?;
    let report = ingest_records(&path, None, stage.loaded.config.records.mode)?;
    for skipped in &report.skipped {
        log::warn!(
            "{}: skipped line {}: {}",
            path.display(),
            skipped.line,
            skipped.message
        );
    }
    if report.records.is_empty() {
        return Err(Failure::data(format!(
            "{} holds no records",
            path.display()
        )));
    }
    Ok(report.records)
}
