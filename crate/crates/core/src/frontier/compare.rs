use serde::{Deserialize, Serialize};

use super::{
    fit_exp_decay, hypervolume_exact2d, hypervolume_paper, normalize_with, pareto_front,
    retrieval_metrics, ExpFit, FrontPoint, ObjectiveBounds, RetrievalMetrics, REFERENCE_POINT,
};
use crate::corpus::{retrieve, Document, MatchProfile};
use crate::error::{Error, Result};
use crate::optimizer::{scalarized_order, Algorithm, Objectives, RunHistory};

/// Published reference values for the three algorithms, shown beside
/// measured ones: (hypervolume, recall, precision, F1).
pub fn paper_reference(algo: Algorithm) -> (f64, f64, f64, f64) {
    match algo {
        Algorithm::Hncsa => (0.153, 0.64, 0.59, 0.61),
        Algorithm::Csa => (0.147, 0.60, 0.58, 0.58),
        Algorithm::Nsga2 => (0.145, 0.54, 0.56, 0.55),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoMetrics {
    pub algo: Algorithm,
    pub seed: u64,
    pub hypervolume_paper: f64,
    pub hypervolume_exact: f64,
    pub front_points: Vec<FrontPoint>,
    pub fit_params: Option<ExpFit>,
    /// Keywords of the front member used for retrieval scoring.
    pub retrieval_combo: Vec<String>,
    #[serde(rename = "R")]
    pub recall: Option<f64>,
    #[serde(rename = "P")]
    pub precision: Option<f64>,
    #[serde(rename = "F1")]
    pub f1: Option<f64>,
}

/// Bounds over every final population and front in `runs`, so that all
/// runs are normalized in one frame.
pub fn common_bounds(runs: &[RunHistory]) -> Result<ObjectiveBounds> {
    let all: Vec<Objectives> = runs
        .iter()
        .flat_map(|h| {
            h.front_objectives().into_iter().chain(
                h.final_population
                    .iter()
                    .map(|s| Objectives { f1: s.f1, f2: s.f2 }),
            )
        })
        .collect();
    ObjectiveBounds::of(&all)
        .ok_or_else(|| Error::Evaluation("no objective values to normalize".into()))
}

/// Hypervolumes, fitted front curve and retrieval scores of one run in the
/// given frame. Retrieval uses the front member ranked best by the
/// scalarized order; recall and precision are absent when the corpus has no
/// relevance labels or nothing is retrieved.
pub fn evaluate_run(
    run: &RunHistory,
    bounds: &ObjectiveBounds,
    profile: &MatchProfile,
    docs: &[Document],
) -> Result<AlgoMetrics> {
    let objs = run.front_objectives();
    let points = pareto_front(&normalize_with(&objs, bounds));
    let fit = if points.len() >= 3 {
        fit_exp_decay(&points).ok()
    } else {
        None
    };

    let combos: Vec<Vec<usize>> = run
        .front
        .iter()
        .map(|s| {
            s.combo
                .iter()
                .map(|k| {
                    profile
                        .keywords()
                        .iter()
                        .position(|p| p == k)
                        .ok_or_else(|| {
                            Error::Evaluation(format!("front keyword {k:?} not in the corpus pool"))
                        })
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;
    let best = scalarized_order(&objs, &combos).first().copied();
    let (retrieval_combo, metrics) = match best {
        Some(b) => {
            let retrieved = retrieve(profile, &combos[b]);
            let relevant: Vec<String> = docs
                .iter()
                .filter(|d| d.relevant == Some(true))
                .map(|d| d.id.clone())
                .collect();
            let m: Option<RetrievalMetrics> =
                retrieval_metrics(&retrieved, &relevant, retrieved.len()).ok();
            (run.front[b].combo.clone(), m)
        }
        None => (Vec::new(), None),
    };

    Ok(AlgoMetrics {
        algo: run.algo,
        seed: run.seed,
        hypervolume_paper: hypervolume_paper(&points, REFERENCE_POINT)?,
        hypervolume_exact: hypervolume_exact2d(&points, REFERENCE_POINT)?,
        front_points: points,
        fit_params: fit,
        retrieval_combo,
        recall: metrics.map(|m| m.recall),
        precision: metrics.map(|m| m.precision),
        f1: metrics.map(|m| m.f1),
    })
}
