mod common;

use std::time::Instant;

use common::{docs, fixture, oracle_counts, oracle_objectives, true_front};
use fgf_core::corpus::{match_counts, MatchProfile};
use fgf_core::keywords::KeywordTaxonomy;
use fgf_core::optimizer::{
    combo_from_position, fitness_balance, fitness_relevance, levy_step, run, scalarized_order,
    usage_weights, Algorithm, Objectives, ParetoArchive, RunConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn k6() -> (Vec<String>, MatchProfile, Vec<Vec<u32>>) {
    let tax = KeywordTaxonomy::load(fixture("taxonomy_k6.txt")).unwrap();
    let d = docs("corpus_k6.jsonl");
    let pool = tax.pool().to_vec();
    let profile = match_counts(&d, &pool).unwrap();
    let counts = oracle_counts(&d, &pool);
    (pool, profile, counts)
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

#[test]
fn k6_profile_matches_regex_counts() {
    let (pool, profile, counts) = k6();
    assert_eq!(pool.len(), 6);
    for (i, row) in counts.iter().enumerate() {
        assert_eq!(profile.row(i), row.as_slice(), "keyword {}", pool[i]);
    }
}

fn front_hits(algo: Algorithm, seeds: u64) -> usize {
    let (pool, profile, counts) = k6();
    let truth: std::collections::BTreeSet<Vec<String>> =
        true_front(&counts, &pool).into_iter().map(sorted).collect();
    (0..seeds)
        .filter(|&seed| {
            let cfg = RunConfig::default().with_algo(algo).with_seed(seed);
            let h = run(&cfg, &profile).unwrap();
            h.front
                .iter()
                .all(|s| truth.contains(&sorted(s.combo.clone())))
        })
        .count()
}

#[test]
fn hncsa_front_lies_on_true_front() {
    let t = Instant::now();
    let hits = front_hits(Algorithm::Hncsa, 20);
    assert!(hits >= 18, "{hits}/20 seeds");
    assert!(t.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn csa_front_lies_on_true_front() {
    let hits = front_hits(Algorithm::Csa, 20);
    assert!(hits >= 16, "{hits}/20 seeds");
}

#[test]
fn nsga2_front_lies_on_true_front() {
    let hits = front_hits(Algorithm::Nsga2, 20);
    assert!(hits >= 15, "{hits}/20 seeds");
}

#[test]
fn dominant_keyword_is_in_final_best_combo() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let k = 6;
    let m = 12;
    let counts: Vec<Vec<u32>> = (0..k)
        .map(|i| {
            (0..m)
                .map(|_| {
                    if i == 0 {
                        40 + rng.gen_range(0..5)
                    } else {
                        rng.gen_range(0..2)
                    }
                })
                .collect()
        })
        .collect();
    let pool: Vec<String> = (0..k).map(|i| format!("kw{i}")).collect();
    let profile = MatchProfile::from_counts(
        pool.clone(),
        (0..m).map(|j| format!("d{j}")).collect(),
        counts.clone(),
    )
    .unwrap();
    let truth = true_front(&counts, &pool);
    for algo in Algorithm::ALL {
        let h = run(&RunConfig::default().with_algo(algo).with_seed(1), &profile).unwrap();
        let best = &h.iterations.last().unwrap().best_combo;
        assert!(best.contains(&"kw0".to_string()), "{algo}: {best:?}");
        assert!(
            truth.contains(best),
            "{algo}: {best:?} not on the true front"
        );
    }
}

#[test]
fn same_seed_gives_identical_history() {
    let (_, profile, _) = k6();
    for algo in Algorithm::ALL {
        let cfg = RunConfig::default().with_algo(algo).with_seed(11);
        let a = serde_json::to_string(&run(&cfg, &profile).unwrap()).unwrap();
        let b = serde_json::to_string(&run(&cfg, &profile).unwrap()).unwrap();
        assert_eq!(a, b, "{algo}");
    }
}

#[test]
fn single_iteration_two_nests() {
    let (_, profile, _) = k6();
    for algo in Algorithm::ALL {
        let cfg = RunConfig {
            iterations: 1,
            n_nests: 2,
            ..RunConfig::default().with_algo(algo).with_seed(5)
        };
        let h = run(&cfg, &profile).unwrap();
        assert_eq!(h.iterations.len(), 1, "{algo}");
        assert!(h.evaluations >= 2, "{algo}");
        assert_eq!(h.final_population.len(), 2, "{algo}");
    }
}

#[test]
fn hidden_nest_log_has_one_entry_per_iteration() {
    let (_, profile, _) = k6();
    let cfg = RunConfig {
        iterations: 37,
        ..RunConfig::default().with_seed(2)
    };
    let h = run(&cfg, &profile).unwrap();
    assert_eq!(h.hidden_nests.len(), 37);
    for (t, hn) in h.hidden_nests.iter().enumerate() {
        assert_eq!(hn.iteration, t);
    }
    let csa = run(&cfg.clone().with_algo(Algorithm::Csa), &profile).unwrap();
    assert!(csa.hidden_nests.is_empty());
}

#[test]
fn balance_of_weighted_frequencies() {
    // totals 0, 2, 4 under unit weights
    let p = MatchProfile::from_counts(
        vec!["a".into(), "b".into(), "c".into()],
        vec!["d".into()],
        vec![vec![0], vec![2], vec![4]],
    )
    .unwrap();
    let f1 = fitness_balance(&[0, 1, 2], &p, &[1.0, 1.0, 1.0]);
    assert!((f1 - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert!((f1 - 1.632_99).abs() < 1e-5);
}

#[test]
fn relevance_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let counts: Vec<Vec<u32>> = (0..8)
            .map(|_| (0..10).map(|_| rng.gen_range(0..6)).collect())
            .collect();
        let weights: Vec<f64> = (0..8).map(|_| rng.gen_range(0.01..1.0)).collect();
        let p = MatchProfile::from_counts(
            (0..8).map(|i| format!("k{i}")).collect(),
            (0..10).map(|j| format!("d{j}")).collect(),
            counts.clone(),
        )
        .unwrap();
        let combo = [0, 2, 3, 5, 7];
        let (b, r) = oracle_objectives(&counts, &weights, &combo);
        assert!((fitness_relevance(&combo, &p, &weights).unwrap() - r).abs() < 1e-12);
        assert!((fitness_balance(&combo, &p, &weights) - b).abs() < 1e-9);
    }
}

/// Hill estimate of the tail index from the `k` largest of `xs`.
fn hill(mut xs: Vec<f64>, k: usize) -> f64 {
    xs.sort_by(|a, b| b.total_cmp(a));
    let threshold = xs[k].ln();
    let mean: f64 = xs[..k].iter().map(|x| x.ln() - threshold).sum::<f64>() / k as f64;
    1.0 / mean
}

#[test]
fn levy_tail_exponent() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let steps: Vec<f64> = levy_step(1.5, 1.0, 100_000, &mut rng)
        .into_iter()
        .map(f64::abs)
        .collect();
    let est = hill(steps, 1000);
    assert!((est - 1.5).abs() <= 0.15, "tail index {est}");
}

proptest! {
    #[test]
    fn positions_decode_to_nonempty_sorted_combos(x in prop::collection::vec(0.0f64..1.0, 1..30)) {
        let c = combo_from_position(&x);
        prop_assert!(!c.is_empty());
        prop_assert!(c.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(c.iter().all(|&i| i < x.len()));
        for (i, &v) in x.iter().enumerate() {
            if v >= 0.5 {
                prop_assert!(c.contains(&i));
            }
        }
    }

    #[test]
    fn usage_weights_are_a_distribution(
        combos in prop::collection::vec(prop::collection::btree_set(0usize..10, 1..10), 0..20)
    ) {
        let combos: Vec<Vec<usize>> = combos.into_iter().map(|s| s.into_iter().collect()).collect();
        let w = usage_weights(&combos, 10);
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(w.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn archive_is_mutually_non_dominated(pts in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..60)) {
        let mut a = ParetoArchive::default();
        for (i, (f1, f2)) in pts.iter().enumerate() {
            a.insert(&[i], Objectives { f1: *f1, f2: *f2 });
        }
        let entries = a.sorted();
        for (_, x) in &entries {
            for (_, y) in &entries {
                prop_assert!(!x.dominates(y));
            }
            // nothing offered dominates a survivor
            for (f1, f2) in &pts {
                let offered = Objectives { f1: *f1, f2: *f2 };
                prop_assert!(!offered.dominates(x));
            }
        }
    }

    #[test]
    fn scalarized_order_is_a_permutation(pts in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..40)) {
        let objs: Vec<Objectives> = pts.iter().map(|&(f1, f2)| Objectives { f1, f2 }).collect();
        let combos: Vec<Vec<usize>> = (0..objs.len()).map(|i| vec![i]).collect();
        let mut order = scalarized_order(&objs, &combos);
        order.sort_unstable();
        prop_assert_eq!(order, (0..objs.len()).collect::<Vec<_>>());
    }

    #[test]
    fn balance_is_non_negative_and_zero_for_singletons(
        totals in prop::collection::vec(0u32..50, 2..12),
        pick in 0usize..12,
    ) {
        let k = totals.len();
        let p = MatchProfile::from_counts(
            (0..k).map(|i| format!("k{i}")).collect(),
            vec!["d".into()],
            totals.iter().map(|&t| vec![t]).collect(),
        ).unwrap();
        let w = vec![1.0 / k as f64; k];
        let all: Vec<usize> = (0..k).collect();
        prop_assert!(fitness_balance(&all, &p, &w) >= 0.0);
        prop_assert_eq!(fitness_balance(&[pick % k], &p, &w), 0.0);
    }
}
