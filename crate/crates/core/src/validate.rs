//! Dataset-quality metrics: paired cosine statistics between record fields,
//! k-means clustering and silhouette scores.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Cosine statistics between two per-record fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldPairStats {
    pub name: String,
    /// Mean of `cos(a_i, b_i)`: the same record's two fields.
    pub paired_mean: f64,
    /// Mean of `cos(a_i, b_j)` over `i != j`.
    pub cross_mean: f64,
    pub paired_count: usize,
    pub cross_count: usize,
    /// Records dropped because one of their two vectors has zero norm.
    pub zero_norm: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub pairs: Vec<FieldPairStats>,
    /// Paired cosines pooled over every field pair.
    pub diag_mean: f64,
    /// Cross-record cosines pooled over every field pair.
    pub offdiag_mean: f64,
    pub zero_norm: usize,
}

/// One named field pair: row `i` of `a` and row `i` of `b` belong to the same record.
pub struct FieldPair<'a> {
    pub name: &'a str,
    pub a: &'a [Vec<f64>],
    pub b: &'a [Vec<f64>],
}

fn unit_rows(rows: &[Vec<f64>]) -> Vec<Option<Vec<f64>>> {
    rows.iter()
        .map(|v| {
            let n = norm(v);
            (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cosine_block_stats(pairs: &[FieldPair<'_>]) -> Result<SimilarityReport> {
    let mut out = Vec::with_capacity(pairs.len());
    let (mut diag_sum, mut diag_n, mut off_sum, mut off_n, mut zero_total) =
        (0.0, 0usize, 0.0, 0usize, 0usize);
    for p in pairs {
        if p.a.len() != p.b.len() {
            return Err(Error::Shape(format!(
                "{}: {} vs {} rows",
                p.name,
                p.a.len(),
                p.b.len()
            )));
        }
        let dim = p.a.first().map_or(0, Vec::len);
        if p.a.iter().chain(p.b).any(|v| v.len() != dim) {
            return Err(Error::Shape(format!(
                "{}: vectors must all have length {dim}",
                p.name
            )));
        }
        let ua = unit_rows(p.a);
        let ub = unit_rows(p.b);
        let keep: Vec<usize> = (0..ua.len())
            .filter(|&i| ua[i].is_some() && ub[i].is_some())
            .collect();
        let zero = ua.len() - keep.len();
        let paired: f64 = keep
            .iter()
            .map(|&i| dot(ua[i].as_ref().unwrap(), ub[i].as_ref().unwrap()))
            .sum();
        let cross: f64 = keep
            .par_iter()
            .map(|&i| {
                let a = ua[i].as_ref().unwrap();
                keep.iter()
                    .filter(|&&j| j != i)
                    .map(|&j| dot(a, ub[j].as_ref().unwrap()))
                    .sum::<f64>()
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum();
        let pc = keep.len();
        let cc = pc * pc.saturating_sub(1);
        out.push(FieldPairStats {
            name: p.name.to_string(),
            paired_mean: if pc > 0 {
                (paired / pc as f64).clamp(-1.0, 1.0)
            } else {
                0.0
            },
            cross_mean: if cc > 0 {
                (cross / cc as f64).clamp(-1.0, 1.0)
            } else {
                0.0
            },
            paired_count: pc,
            cross_count: cc,
            zero_norm: zero,
        });
        diag_sum += paired;
        diag_n += pc;
        off_sum += cross;
        off_n += cc;
        zero_total += zero;
    }
    Ok(SimilarityReport {
        pairs: out,
        diag_mean: if diag_n > 0 {
            (diag_sum / diag_n as f64).clamp(-1.0, 1.0)
        } else {
            0.0
        },
        offdiag_mean: if off_n > 0 {
            (off_sum / off_n as f64).clamp(-1.0, 1.0)
        } else {
            0.0
        },
        zero_norm: zero_total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Inertia after each assignment step.
    pub inertia_history: Vec<f64>,
    pub converged: bool,
}

impl KMeansResult {
    pub fn inertia(&self) -> f64 {
        self.inertia_history.last().copied().unwrap_or(0.0)
    }
}

fn check_matrix(features: &[Vec<f64>]) -> Result<usize> {
    let d = features.first().map_or(0, Vec::len);
    if let Some(i) = features.iter().position(|r| r.len() != d) {
        return Err(Error::Shape(format!(
            "row {i} has length {}, expected {d}",
            features[i].len()
        )));
    }
    Ok(d)
}

fn nearest(x: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(c, m)| (c, dist2(x, m)))
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        )
}

/// k-means++ seeding followed by Lloyd iterations until assignments stop
/// changing or `max_iter` is reached. An emptied cluster is re-seeded at the
/// point farthest from its centroid.
pub fn kmeans(features: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Result<KMeansResult> {
    let n = features.len();
    let d = check_matrix(features)?;
    if k == 0 || k > n {
        return Err(Error::Config(format!("k = {k} needs 1 <= k <= rows ({n})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = vec![features[rng.gen_range(0..n)].clone()];
    let mut closest: Vec<f64> = features.iter().map(|x| dist2(x, &centroids[0])).collect();
    while centroids.len() < k {
        let next = match WeightedIndex::new(&closest) {
            Ok(w) => w.sample(&mut rng),
            // every point already coincides with a centroid
            Err(_) => rng.gen_range(0..n),
        };
        centroids.push(features[next].clone());
        let c = centroids.last().unwrap();
        for (i, x) in features.iter().enumerate() {
            closest[i] = closest[i].min(dist2(x, c));
        }
    }

    let mut assignments = vec![usize::MAX; n];
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter.max(1) {
        let next: Vec<(usize, f64)> = features
            .par_iter()
            .map(|x| nearest(x, &centroids))
            .collect();
        history.push(next.iter().map(|p| p.1).sum());
        let changed = next.iter().zip(&assignments).any(|(a, &b)| a.0 != b);
        for (slot, a) in assignments.iter_mut().zip(&next) {
            *slot = a.0;
        }
        if !changed {
            converged = true;
            break;
        }
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (x, &a) in features.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(x) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .filter(|&i| counts[assignments[i]] > 1)
                    .max_by(|&a, &b| {
                        dist2(&features[a], &centroids[assignments[a]])
                            .total_cmp(&dist2(&features[b], &centroids[assignments[b]]))
                            .then(b.cmp(&a))
                    });
                if let Some(i) = far {
                    counts[assignments[i]] -= 1;
                    counts[c] = 1;
                    centroids[c] = features[i].clone();
                }
            }
        }
    }
    Ok(KMeansResult {
        k,
        assignments,
        centroids,
        inertia_history: history,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteReport {
    pub score: f64,
    pub per_sample: Vec<f64>,
    pub per_label: BTreeMap<usize, f64>,
}

/// Mean of `(b - a) / max(a, b)` with Euclidean distances; members of a
/// singleton label score 0.
pub fn silhouette(features: &[Vec<f64>], labels: &[usize]) -> Result<SilhouetteReport> {
    if features.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} rows vs {} labels",
            features.len(),
            labels.len()
        )));
    }
    check_matrix(features)?;
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in labels {
        *sizes.entry(l).or_insert(0) += 1;
    }
    if sizes.len() < 2 {
        return Err(Error::Validation(
            "silhouette needs at least two distinct labels".into(),
        ));
    }
    let slot: BTreeMap<usize, usize> = sizes.keys().enumerate().map(|(i, &l)| (l, i)).collect();
    let counts: Vec<usize> = sizes.values().copied().collect();
    let per_sample: Vec<f64> = (0..features.len())
        .into_par_iter()
        .map(|i| {
            let own = slot[&labels[i]];
            if counts[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; counts.len()];
            for (j, x) in features.iter().enumerate() {
                if j != i {
                    sums[slot[&labels[j]]] += dist2(&features[i], x).sqrt();
                }
            }
            let a = sums[own] / (counts[own] - 1) as f64;
            let b = (0..counts.len())
                .filter(|&c| c != own)
                .map(|c| sums[c] / counts[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m == 0.0 {
                0.0
            } else {
                (b - a) / m
            }
        })
        .collect();
    let mut per_label = BTreeMap::new();
    for (&l, &c) in &sizes {
        let s: f64 = per_sample
            .iter()
            .zip(labels)
            .filter(|(_, &x)| x == l)
            .map(|(v, _)| v)
            .sum();
        per_label.insert(l, s / c as f64);
    }
    Ok(SilhouetteReport {
        score: per_sample.iter().sum::<f64>() / per_sample.len() as f64,
        per_sample,
        per_label,
    })
}
