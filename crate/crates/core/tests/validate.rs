use std::collections::BTreeSet;

use fgf_core::validate::{cosine_block_stats, kmeans, silhouette, FieldPair};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn blobs(seed: u64, per: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let centers = [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0]];
    let noise = Normal::new(0.0, 0.8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (c, m) in centers.iter().enumerate() {
        for _ in 0..per {
            xs.push(vec![
                m[0] + noise.sample(&mut rng),
                m[1] + noise.sample(&mut rng),
            ]);
            ys.push(c);
        }
    }
    (xs, ys)
}

/// Silhouette by its definition, with no shortcuts.
fn silhouette_oracle(xs: &[Vec<f64>], labels: &[usize]) -> f64 {
    let d = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let classes: BTreeSet<usize> = labels.iter().copied().collect();
    let mut total = 0.0;
    for i in 0..xs.len() {
        let own: Vec<usize> = (0..xs.len())
            .filter(|&j| j != i && labels[j] == labels[i])
            .collect();
        if own.is_empty() {
            continue;
        }
        let a = own.iter().map(|&j| d(&xs[i], &xs[j])).sum::<f64>() / own.len() as f64;
        let b = classes
            .iter()
            .filter(|&&c| c != labels[i])
            .map(|&c| {
                let m: Vec<usize> = (0..xs.len()).filter(|&j| labels[j] == c).collect();
                m.iter().map(|&j| d(&xs[i], &xs[j])).sum::<f64>() / m.len() as f64
            })
            .fold(f64::INFINITY, f64::min);
        total += (b - a) / a.max(b);
    }
    total / xs.len() as f64
}

#[test]
fn kmeans_recovers_separated_blobs() {
    let mut recovered = 0;
    for seed in 0..20 {
        let (xs, ys) = blobs(seed, 25);
        let r = kmeans(&xs, 4, seed, 300).unwrap();
        // every found cluster holds exactly one true blob
        let pure = (0..4).all(|c| {
            let members: BTreeSet<usize> = (0..xs.len())
                .filter(|&i| r.assignments[i] == c)
                .map(|i| ys[i])
                .collect();
            members.len() == 1
        });
        let used: BTreeSet<usize> = r.assignments.iter().copied().collect();
        if pure && used.len() == 4 && r.converged {
            recovered += 1;
        }
    }
    assert_eq!(recovered, 20);
}

#[test]
fn kmeans_inertia_never_increases() {
    let (xs, _) = blobs(3, 30);
    let r = kmeans(&xs, 6, 1, 300).unwrap();
    for w in r.inertia_history.windows(2) {
        assert!(w[1] <= w[0] + 1e-9);
    }
    assert_eq!(r, kmeans(&xs, 6, 1, 300).unwrap());
}

#[test]
fn silhouette_matches_definition() {
    let (xs, ys) = blobs(8, 10);
    let got = silhouette(&xs, &ys).unwrap().score;
    assert!((got - silhouette_oracle(&xs, &ys)).abs() < 1e-12);
    assert!(got > 0.8);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xs: Vec<Vec<f64>> = (0..40)
        .map(|_| (0..3).map(|_| rng.gen()).collect())
        .collect();
    let mut ys: Vec<usize> = (0..40).map(|_| rng.gen_range(0..4)).collect();
    ys[0] = 9;
    assert!((silhouette(&xs, &ys).unwrap().score - silhouette_oracle(&xs, &ys)).abs() < 1e-12);
}

#[test]
fn random_labels_score_near_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let xs: Vec<Vec<f64>> = (0..500)
        .map(|_| (0..5).map(|_| rng.gen()).collect())
        .collect();
    let ys: Vec<usize> = (0..500).map(|_| rng.gen_range(0..4)).collect();
    let s = silhouette(&xs, &ys).unwrap().score;
    assert!(s.abs() < 0.1, "{s}");
}

#[test]
fn paired_fields_score_above_cross_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a: Vec<Vec<f64>> = (0..30)
        .map(|_| (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let b: Vec<Vec<f64>> = a
        .iter()
        .map(|v| v.iter().map(|x| x + rng.gen_range(-0.1..0.1)).collect())
        .collect();
    let mut a0 = a.clone();
    a0[3] = vec![0.0; 8];
    let r = cosine_block_stats(&[FieldPair {
        name: "ab",
        a: &a0,
        b: &b,
    }])
    .unwrap();
    let p = &r.pairs[0];
    assert_eq!(
        (p.paired_count, p.cross_count, p.zero_norm),
        (29, 29 * 28, 1)
    );
    assert!(p.paired_mean > 0.95);
    assert!(p.cross_mean.abs() < 0.2);

    let cos = |x: &[f64], y: &[f64]| {
        let d: f64 = x.iter().zip(y).map(|(u, v)| u * v).sum();
        d / (x.iter().map(|u| u * u).sum::<f64>().sqrt()
            * y.iter().map(|u| u * u).sum::<f64>().sqrt())
    };
    let keep: Vec<usize> = (0..30).filter(|&i| i != 3).collect();
    let want = keep.iter().map(|&i| cos(&a0[i], &b[i])).sum::<f64>() / 29.0;
    assert!((p.paired_mean - want).abs() < 1e-12);
}

proptest! {
    #[test]
    fn silhouette_is_scale_and_shift_invariant(seed in 0u64..200, scale in 0.01f64..100.0, shift in -50.0f64..50.0) {
        let (xs, ys) = blobs(seed, 6);
        let moved: Vec<Vec<f64>> = xs.iter().map(|v| v.iter().map(|x| x * scale + shift).collect()).collect();
        let a = silhouette(&xs, &ys).unwrap().score;
        let b = silhouette(&moved, &ys).unwrap().score;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn silhouette_lies_in_unit_range(seed in 0u64..500, k in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<Vec<f64>> = (0..30).map(|_| (0..2).map(|_| rng.gen()).collect()).collect();
        let ys: Vec<usize> = (0..30).map(|_| rng.gen_range(0..k)).collect();
        let r = silhouette(&xs, &ys).unwrap();
        prop_assert!(r.per_sample.iter().all(|s| (-1.0..=1.0).contains(s)));
        prop_assert!((-1.0..=1.0).contains(&r.score));
    }

    #[test]
    fn kmeans_assigns_every_point_to_its_nearest_centroid(seed in 0u64..200, k in 1usize..6) {
        let (xs, _) = blobs(seed, 8);
        let r = kmeans(&xs, k, seed, 300).unwrap();
        prop_assert!(r.assignments.iter().all(|&c| c < k));
        if r.converged {
            for (x, &c) in xs.iter().zip(&r.assignments) {
                let d = |m: &Vec<f64>| x.iter().zip(m).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
                let best = r.centroids.iter().map(d).fold(f64::INFINITY, f64::min);
                prop_assert!(d(&r.centroids[c]) <= best + 1e-9);
            }
        }
    }
}
