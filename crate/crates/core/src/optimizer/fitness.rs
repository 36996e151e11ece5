//! The two objectives of a keyword combination.

use serde::{Deserialize, Serialize};

use crate::corpus::MatchProfile;
use crate::error::{Error, Result};

/// Objective pair: `f1` (balance, minimized) and `f2` (relevance, maximized).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub f1: f64,
    pub f2: f64,
}

impl Objectives {
    /// Pareto dominance with `f1` minimized and `f2` maximized.
    pub fn dominates(&self, other: &Objectives) -> bool {
        self.f1 <= other.f1 && self.f2 >= other.f2 && (self.f1 < other.f1 || self.f2 > other.f2)
    }

    /// Both coordinates as minimization targets.
    pub fn as_minimization(&self) -> [f64; 2] {
        [self.f1, -self.f2]
    }
}

/// Population standard deviation of the weighted frequencies
/// `w_i * sum_j c_ij` of the combo's keywords.
pub fn fitness_balance(combo: &[usize], profile: &MatchProfile, weights: &[f64]) -> f64 {
    balance_from_totals(combo, &profile.totals(), weights)
}

/// Mean over documents of the weight-averaged match count of the combo's
/// keywords. Fails on an empty corpus.
pub fn fitness_relevance(combo: &[usize], profile: &MatchProfile, weights: &[f64]) -> Result<f64> {
    if profile.n_docs() == 0 {
        return Err(Error::Evaluation(
            "relevance fitness needs at least one document".into(),
        ));
    }
    Ok(relevance_from_totals(
        combo,
        &profile.totals(),
        weights,
        profile.n_docs(),
    ))
}

pub(crate) fn balance_from_totals(combo: &[usize], totals: &[f64], weights: &[f64]) -> f64 {
    if combo.is_empty() {
        return 0.0;
    }
    let n = combo.len() as f64;
    let xs: Vec<f64> = combo.iter().map(|&i| weights[i] * totals[i]).collect();
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

// sum_j sum_i c_ij w_i / W over m documents collapses to sum_i w_i T_i / (m W).
pub(crate) fn relevance_from_totals(
    combo: &[usize],
    totals: &[f64],
    weights: &[f64],
    n_docs: usize,
) -> f64 {
    if combo.is_empty() || n_docs == 0 {
        return 0.0;
    }
    let m = n_docs as f64;
    let w_sum: f64 = combo.iter().map(|&i| weights[i]).sum();
    if w_sum > 0.0 {
        combo.iter().map(|&i| weights[i] * totals[i]).sum::<f64>() / (m * w_sum)
    } else {
        // no weight mass: unweighted mean
        combo.iter().map(|&i| totals[i]).sum::<f64>() / (m * combo.len() as f64)
    }
}
