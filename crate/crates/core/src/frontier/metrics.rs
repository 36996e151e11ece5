use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrievalMetrics {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

/// Harmonic mean of recall and precision; zero when both are zero.
pub fn f1_score(recall: f64, precision: f64) -> f64 {
    if recall + precision == 0.0 {
        0.0
    } else {
        2.0 * recall * precision / (recall + precision)
    }
}

/// Recall `T1/T` against the relevant set and precision `T1/T*` against the
/// number of retrieved documents, where `T1` counts retrieved ids that are
/// relevant.
pub fn retrieval_metrics<S: AsRef<str>>(
    retrieved: &[S],
    relevant: &[S],
    all_retrieved: usize,
) -> Result<RetrievalMetrics> {
    let relevant: HashSet<&str> = relevant.iter().map(AsRef::as_ref).collect();
    if relevant.is_empty() {
        return Err(Error::UndefinedMetric(
            "recall needs at least one relevant document".into(),
        ));
    }
    if all_retrieved == 0 {
        return Err(Error::UndefinedMetric(
            "precision needs at least one retrieved document".into(),
        ));
    }
    let retrieved: HashSet<&str> = retrieved.iter().map(AsRef::as_ref).collect();
    let hits = retrieved.intersection(&relevant).count() as f64;
    let recall = hits / relevant.len() as f64;
    let precision = hits / all_retrieved as f64;
    Ok(RetrievalMetrics {
        recall,
        precision,
        f1: f1_score(recall, precision),
    })
}
