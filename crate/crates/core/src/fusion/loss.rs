use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LOG_FLOOR: f64 = 1e-12;

/// `-(1/N) sum_i sum_c w_c y_ic ln p_ic` with one-hot `y` from `labels`.
pub fn weighted_ce_loss(
    probs: &[Vec<f64>],
    labels: &[usize],
    class_weights: &[f64],
) -> Result<f64> {
    if probs.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} probability rows vs {} labels",
            probs.len(),
            labels.len()
        )));
    }
    if probs.is_empty() {
        return Err(Error::Shape("no samples".into()));
    }
    let c = class_weights.len();
    let mut total = 0.0;
    for (i, (row, &y)) in probs.iter().zip(labels).enumerate() {
        if row.len() != c {
            return Err(Error::Shape(format!(
                "row {i} has {} classes, expected {c}",
                row.len()
            )));
        }
        if y >= c {
            return Err(Error::Shape(format!(
                "label {y} at row {i} out of range for {c} classes"
            )));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Validation(format!(
                "probabilities in row {i} sum to {sum}"
            )));
        }
        total -= class_weights[y] * row[y].max(LOG_FLOOR).ln();
    }
    Ok(total / probs.len() as f64)
}

/// Mixing coefficients for fusion-derived class weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossMix {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for LossMix {
    fn default() -> Self {
        Self {
            alpha: 1.0 / 3.0,
            beta: 1.0 / 3.0,
            gamma: 1.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeightMode {
    #[default]
    Fusion,
    Frequency,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// `alpha * omega1 + beta * mean(omega2 | class) + gamma * mean(omega3 | class)`.
/// A class without samples uses the dataset means.
pub fn class_weights_fusion(
    labels: &[usize],
    n_classes: usize,
    omega1: f64,
    omega2: &[f64],
    omega3: &[f64],
    mix: LossMix,
) -> Result<Vec<f64>> {
    if omega2.len() != labels.len() || omega3.len() != labels.len() {
        return Err(Error::Shape(
            "per-record weights must align with labels".into(),
        ));
    }
    let global2 = mean(omega2.iter().copied()).unwrap_or(0.0);
    let global3 = mean(omega3.iter().copied()).unwrap_or(0.0);
    Ok((0..n_classes)
        .map(|c| {
            let members = || {
                labels
                    .iter()
                    .enumerate()
                    .filter(move |(_, &l)| l == c)
                    .map(|(i, _)| i)
            };
            let m2 = mean(members().map(|i| omega2[i])).unwrap_or(global2);
            let m3 = mean(members().map(|i| omega3[i])).unwrap_or(global3);
            mix.alpha * omega1 + mix.beta * m2 + mix.gamma * m3
        })
        .collect())
}

/// `N / (C * n_c)`; zero for empty classes.
pub fn class_weights_frequency(labels: &[usize], n_classes: usize) -> Vec<f64> {
    let mut counts = vec![0usize; n_classes];
    for &l in labels {
        if l < n_classes {
            counts[l] += 1;
        }
    }
    let n = labels.len() as f64;
    counts
        .iter()
        .map(|&c| {
            if c == 0 {
                0.0
            } else {
                n / (n_classes as f64 * c as f64)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let p = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(weighted_ce_loss(&p, &[0, 1], &[0.7, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn confident_wrong_is_finite() {
        let l = weighted_ce_loss(&[vec![0.0, 1.0]], &[0], &[1.0, 1.0]).unwrap();
        assert!((l - 12.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn shape_errors() {
        assert!(weighted_ce_loss(&[vec![0.5, 0.5]], &[0, 1], &[1.0, 1.0]).is_err());
        assert!(weighted_ce_loss(&[vec![0.5, 0.5]], &[2], &[1.0, 1.0]).is_err());
        assert!(weighted_ce_loss(&[vec![0.5, 0.6]], &[0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn fusion_class_weights() {
        let w = class_weights_fusion(
            &[0, 0, 1],
            3,
            0.6,
            &[1.0, 0.5, 0.2],
            &[0.0, 1.0, 1.0],
            LossMix::default(),
        )
        .unwrap();
        assert!((w[0] - (0.6 + 0.75 + 0.5) / 3.0).abs() < 1e-15);
        assert!((w[1] - (0.6 + 0.2 + 1.0) / 3.0).abs() < 1e-15);
        assert!((w[2] - (0.6 + 1.7 / 3.0 + 2.0 / 3.0) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn frequency_class_weights() {
        assert_eq!(
            class_weights_frequency(&[0, 0, 0, 1], 2),
            vec![4.0 / 6.0, 2.0]
        );
    }
}
