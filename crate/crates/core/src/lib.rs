//! Keyword-combination search for focused literature retrieval and
//! construction of graph-structured failure-mode datasets from fused
//! text-field embeddings.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod frontier;
pub mod fusion;
pub mod graphset;
pub mod keywords;
pub mod optimizer;
pub mod validate;

pub use corpus::{Document, MatchProfile};
pub use embeddings::EmbeddingTable;
pub use error::{Error, ErrorClass, Result};
pub use frontier::{ExpFit, FrontPoint};
pub use fusion::{FusedFeatureMatrix, FusionWeights, KpcaModel};
pub use graphset::{FailureModeId, FailureRecord, GraphDataset};
pub use keywords::{KeywordTaxonomy, KeywordWeights};
pub use optimizer::{Algorithm, Objectives, RunConfig, RunHistory};
