use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TARGET_VARIANCE: f64 = 0.95;
const EIGEN_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    /// `exp(-gamma * |x - y|^2)`; `None` means `1 / input_dim`.
    Rbf {
        gamma: Option<f64>,
    },
    Linear,
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::Rbf { gamma: None }
    }
}

impl Kernel {
    fn resolved(self, dim: usize) -> Kernel {
        match self {
            Kernel::Rbf { gamma: None } => Kernel::Rbf {
                gamma: Some(1.0 / dim as f64),
            },
            k => k,
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let g = gamma.unwrap_or(1.0 / a.len() as f64);
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-g * d2).exp()
            }
        }
    }
}

/// A fitted kernel PCA: training set, centering statistics and the retained
/// eigenvectors scaled so that training projections have variance equal to
/// the reported eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpcaModel {
    pub kernel: Kernel,
    pub train: Vec<Vec<f64>>,
    pub train_keys: Vec<String>,
    /// Eigenvalues of the centered kernel matrix divided by the sample count,
    /// descending, negatives clipped to zero.
    pub eigenvalues: Vec<f64>,
    /// Cumulative explained variance ratio for every component count.
    pub cumulative: Vec<f64>,
    pub k: usize,
    pub target_variance: f64,
    /// `k` coefficient vectors, each of training-set length.
    pub alphas: Vec<Vec<f64>>,
    col_means: Vec<f64>,
    total_mean: f64,
}

fn kernel_matrix(kernel: &Kernel, xs: &[Vec<f64>]) -> DMatrix<f64> {
    let n = xs.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(&xs[i], &xs[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

fn check_rows(vectors: &[Vec<f64>]) -> Result<usize> {
    if vectors.len() < 2 {
        return Err(Error::Fit(format!(
            "kernel PCA needs at least 2 samples, got {}",
            vectors.len()
        )));
    }
    let dim = vectors[0].len();
    if dim == 0 {
        return Err(Error::Shape("zero-length input vectors".into()));
    }
    if let Some(i) = vectors.iter().position(|v| v.len() != dim) {
        return Err(Error::Shape(format!(
            "sample {i} has length {}, expected {dim}",
            vectors[i].len()
        )));
    }
    Ok(dim)
}

/// Components are chosen as the smallest `k` reaching `target_variance`.
pub fn kpca_fit(vectors: &[Vec<f64>], kernel: Kernel, target_variance: f64) -> Result<KpcaModel> {
    if !(target_variance > 0.0 && target_variance <= 1.0) {
        return Err(Error::Config(format!(
            "target variance {target_variance} outside (0, 1]"
        )));
    }
    fit(vectors, kernel, Selection::Variance(target_variance))
}

/// Keep exactly `k` components.
pub fn kpca_fit_components(vectors: &[Vec<f64>], kernel: Kernel, k: usize) -> Result<KpcaModel> {
    fit(vectors, kernel, Selection::Count(k))
}

enum Selection {
    Variance(f64),
    Count(usize),
}

fn fit(vectors: &[Vec<f64>], kernel: Kernel, selection: Selection) -> Result<KpcaModel> {
    let dim = check_rows(vectors)?;
    let kernel = kernel.resolved(dim);
    let n = vectors.len();
    let nf = n as f64;
    let k = kernel_matrix(&kernel, vectors);

    let col_means: Vec<f64> = (0..n).map(|j| k.column(j).sum() / nf).collect();
    let total_mean = col_means.iter().sum::<f64>() / nf;
    let mut centered = k;
    for i in 0..n {
        for j in 0..n {
            centered[(i, j)] += total_mean - col_means[i] - col_means[j];
        }
    }

    let eig = SymmetricEigen::new(centered);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let raw: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let scale = raw.first().copied().unwrap_or(0.0).abs().max(1.0);
    if let Some(bad) = raw.iter().find(|&&l| l < -EIGEN_FLOOR * scale) {
        log::warn!("centered kernel has a negative eigenvalue {bad}; clipped to 0");
    }
    let clipped: Vec<f64> = raw.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= EIGEN_FLOOR * scale * nf || clipped[0] <= EIGEN_FLOOR * scale {
        return Err(Error::ZeroVariance(
            "all samples are identical in feature space".into(),
        ));
    }
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    for l in &clipped {
        acc += l;
        cumulative.push(acc / total);
    }

    let positive = clipped
        .iter()
        .take_while(|&&l| l > EIGEN_FLOOR * scale)
        .count();
    let (k, target_variance) = match selection {
        Selection::Variance(t) => {
            let k = cumulative.iter().position(|&g| g >= t).map_or(n, |i| i + 1);
            (k.min(positive.max(1)), t)
        }
        Selection::Count(c) => {
            if c == 0 || c > positive {
                return Err(Error::Fit(format!(
                    "requested {c} components, {positive} have positive variance"
                )));
            }
            (c, cumulative[c - 1])
        }
    };

    let alphas = order[..k]
        .iter()
        .zip(&clipped)
        .map(|(&col, &lambda)| {
            let mut a: Vec<f64> = eig.eigenvectors.column(col).iter().copied().collect();
            let pivot =
                a.iter().enumerate().fold(
                    0,
                    |best, (i, v)| if v.abs() > a[best].abs() { i } else { best },
                );
            let sign = if a[pivot] < 0.0 { -1.0 } else { 1.0 };
            let s = sign / lambda.sqrt();
            a.iter_mut().for_each(|x| *x *= s);
            a
        })
        .collect();

    Ok(KpcaModel {
        kernel,
        train: vectors.to_vec(),
        train_keys: Vec::new(),
        eigenvalues: clipped.iter().map(|l| l / nf).collect(),
        cumulative,
        k,
        target_variance,
        alphas,
        col_means,
        total_mean,
    })
}

impl KpcaModel {
    pub fn input_dim(&self) -> usize {
        self.train[0].len()
    }

    pub fn with_keys(mut self, keys: Vec<String>) -> Self {
        self.train_keys = keys;
        self
    }

    /// Cumulative explained variance of the retained components.
    pub fn variance_ratio(&self) -> f64 {
        self.cumulative[self.k - 1]
    }

    pub fn project_one(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::Projection(format!(
                "input has length {}, model was fit on length {}",
                x.len(),
                self.input_dim()
            )));
        }
        let n = self.train.len() as f64;
        let row: Vec<f64> = self.train.iter().map(|t| self.kernel.eval(x, t)).collect();
        let row_mean = row.iter().sum::<f64>() / n;
        let centered: Vec<f64> = row
            .iter()
            .zip(&self.col_means)
            .map(|(v, m)| v - row_mean - m + self.total_mean)
            .collect();
        Ok(self
            .alphas
            .iter()
            .map(|a| a.iter().zip(&centered).map(|(x, y)| x * y).sum())
            .collect())
    }
}

pub fn kpca_project(model: &KpcaModel, vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    vectors.par_iter().map(|v| model.project_one(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Vec<Vec<f64>> {
        vec![
            vec![2.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.5],
            vec![1.0, 3.0, -1.0],
            vec![-1.0, 0.5, 0.0],
            vec![0.5, -2.0, 2.0],
        ]
    }

    #[test]
    fn self_projection_matches_training_scores() {
        let m = kpca_fit(&data(), Kernel::default(), 0.95).unwrap();
        let p = kpca_project(&m, &data()).unwrap();
        // training scores have mean zero and variance equal to the eigenvalue
        for c in 0..m.k {
            let col: Vec<f64> = p.iter().map(|r| r[c]).collect();
            let mean = col.iter().sum::<f64>() / 5.0;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
            assert!(mean.abs() < 1e-10);
            assert!((var - m.eigenvalues[c]).abs() < 1e-10);
        }
    }

    #[test]
    fn k_is_minimal() {
        let m = kpca_fit(&data(), Kernel::Linear, 0.95).unwrap();
        assert!(m.cumulative[m.k - 1] >= 0.95);
        if m.k > 1 {
            assert!(m.cumulative[m.k - 2] < 0.95);
        }
        assert!((m.cumulative.last().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identical_samples_are_zero_variance() {
        let xs = vec![vec![1.0, 2.0]; 4];
        assert!(matches!(
            kpca_fit(&xs, Kernel::Linear, 0.95),
            Err(Error::ZeroVariance(_))
        ));
        assert!(matches!(
            kpca_fit(&xs, Kernel::default(), 0.95),
            Err(Error::ZeroVariance(_))
        ));
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            kpca_fit(&data()[..1], Kernel::Linear, 0.95),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let m = kpca_fit(&data(), Kernel::Linear, 0.95).unwrap();
        assert!(matches!(m.project_one(&[1.0]), Err(Error::Projection(_))));
        assert!(m
            .project_one(&[0.0, 0.0, 0.0])
            .unwrap()
            .iter()
            .all(|v| v.is_finite()));
    }

    #[test]
    fn json_round_trip() {
        let m = kpca_fit(&data(), Kernel::default(), 0.95).unwrap();
        let back: KpcaModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
