//! Pareto fronts in normalized objective space, front-curve fitting,
//! hypervolume, and retrieval metrics.

mod compare;
mod curve;
mod hypervolume;
mod metrics;

use serde::{Deserialize, Serialize};

use crate::optimizer::Objectives;

pub use compare::{common_bounds, evaluate_run, paper_reference, AlgoMetrics};
pub use curve::{fit_exp_decay, select_representatives, ExpFit};
pub use hypervolume::{box_sum, hypervolume_exact2d, hypervolume_paper, REFERENCE_POINT};
pub use metrics::{f1_score, retrieval_metrics, RetrievalMetrics};

/// A point in minimization-normalized objective space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub g: [f64; 2],
    pub origin: usize,
}

impl FrontPoint {
    pub fn new(g1: f64, g2: f64, origin: usize) -> Self {
        Self {
            g: [g1, g2],
            origin,
        }
    }

    pub fn dominates(&self, other: &FrontPoint) -> bool {
        self.g[0] <= other.g[0]
            && self.g[1] <= other.g[1]
            && (self.g[0] < other.g[0] || self.g[1] < other.g[1])
    }
}

/// Min-max bounds of raw objectives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBounds {
    pub f1_min: f64,
    pub f1_max: f64,
    pub f2_min: f64,
    pub f2_max: f64,
}

impl ObjectiveBounds {
    pub fn of(points: &[Objectives]) -> Option<Self> {
        let first = points.first()?;
        let mut b = ObjectiveBounds {
            f1_min: first.f1,
            f1_max: first.f1,
            f2_min: first.f2,
            f2_max: first.f2,
        };
        for p in &points[1..] {
            b.f1_min = b.f1_min.min(p.f1);
            b.f1_max = b.f1_max.max(p.f1);
            b.f2_min = b.f2_min.min(p.f2);
            b.f2_max = b.f2_max.max(p.f2);
        }
        Some(b)
    }

    /// `g1 = minmax(f1)`, `g2 = 1 - minmax(f2)`; a constant coordinate maps to 0.
    /// Values outside the bounds are clamped into `[0,1]`.
    pub fn normalize(&self, p: &Objectives) -> [f64; 2] {
        let scale = |v: f64, lo: f64, hi: f64| {
            if hi > lo {
                ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        };
        let g1 = scale(p.f1, self.f1_min, self.f1_max);
        let g2 = if self.f2_max > self.f2_min {
            1.0 - scale(p.f2, self.f2_min, self.f2_max)
        } else {
            0.0
        };
        [g1, g2]
    }
}

/// Normalize objective pairs against their own min-max bounds.
pub fn normalize_objectives(points: &[Objectives]) -> Vec<FrontPoint> {
    match ObjectiveBounds::of(points) {
        Some(b) => normalize_with(points, &b),
        None => Vec::new(),
    }
}

pub fn normalize_with(points: &[Objectives], bounds: &ObjectiveBounds) -> Vec<FrontPoint> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let g = bounds.normalize(p);
            FrontPoint { g, origin: i }
        })
        .collect()
}

/// Points not dominated by any other point, in input order.
pub fn pareto_front(points: &[FrontPoint]) -> Vec<FrontPoint> {
    let mut sorted: Vec<usize> = (0..points.len()).collect();
    sorted.sort_by(|&a, &b| {
        points[a].g[0]
            .total_cmp(&points[b].g[0])
            .then(points[a].g[1].total_cmp(&points[b].g[1]))
    });
    // sweep by g1 ascending; a point survives if its g2 is below every earlier
    // point with strictly smaller g1, or ties the best g2 within its own g1 group
    let mut keep = vec![false; points.len()];
    let mut best_g2 = f64::INFINITY;
    let mut i = 0;
    while i < sorted.len() {
        let g1 = points[sorted[i]].g[0];
        let mut j = i;
        while j < sorted.len() && points[sorted[j]].g[0] == g1 {
            j += 1;
        }
        let group_min = points[sorted[i]].g[1];
        if group_min < best_g2 {
            for &idx in &sorted[i..j] {
                if points[idx].g[1] == group_min {
                    keep[idx] = true;
                }
            }
            best_g2 = group_min;
        }
        i = j;
    }
    points
        .iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(*p))
        .collect()
}
