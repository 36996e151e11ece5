//! NSGA-II on the keyword bitmask: fast non-dominated sorting, crowding
//! distance, binary tournament, uniform crossover and per-bit flip mutation.
//! Objectives use the fixed reference weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{population_digest, Objectives, Problem, Recorder, RunConfig, RunHistory};

const CROSSOVER_RATE: f64 = 0.9;

fn dominates_min(a: &[f64; 2], b: &[f64; 2]) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])
}

/// Fronts of mutually non-dominated indices under minimization, best first.
pub fn fast_non_dominated_sort(points: &[[f64; 2]]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    let mut fronts = vec![Vec::new()];
    for p in 0..n {
        for q in 0..n {
            if dominates_min(&points[p], &points[q]) {
                dominated_by_me[p].push(q);
            } else if dominates_min(&points[q], &points[p]) {
                domination_count[p] += 1;
            }
        }
        if domination_count[p] == 0 {
            fronts[0].push(p);
        }
    }
    let mut i = 0;
    while !fronts[i].is_empty() {
        let mut next = Vec::new();
        for &p in &fronts[i] {
            for &q in &dominated_by_me[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        i += 1;
        fronts.push(next);
    }
    fronts.pop();
    fronts
}

/// Crowding distance of each member of `front` (same order as `front`).
pub fn crowding_distance(points: &[[f64; 2]], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut dist = vec![0.0; m];
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    for obj in 0..2 {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            points[front[a]][obj]
                .total_cmp(&points[front[b]][obj])
                .then(a.cmp(&b))
        });
        let lo = points[front[order[0]]][obj];
        let hi = points[front[order[m - 1]]][obj];
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        if hi > lo {
            for w in 1..m - 1 {
                let gap = points[front[order[w + 1]]][obj] - points[front[order[w - 1]]][obj];
                dist[order[w]] += gap / (hi - lo);
            }
        }
    }
    dist
}

fn combo_of(bits: &[bool]) -> Vec<usize> {
    (0..bits.len()).filter(|&i| bits[i]).collect()
}

fn ensure_nonempty(bits: &mut [bool], rng: &mut ChaCha8Rng) {
    if !bits.iter().any(|&b| b) {
        let i = rng.gen_range(0..bits.len());
        bits[i] = true;
    }
}

struct Ranked {
    rank: Vec<usize>,
    crowding: Vec<f64>,
}

fn rank_population(points: &[[f64; 2]]) -> Ranked {
    let mut rank = vec![0; points.len()];
    let mut crowding = vec![0.0; points.len()];
    for (r, front) in fast_non_dominated_sort(points).iter().enumerate() {
        let d = crowding_distance(points, front);
        for (j, &i) in front.iter().enumerate() {
            rank[i] = r;
            crowding[i] = d[j];
        }
    }
    Ranked { rank, crowding }
}

fn tournament(ranked: &Ranked, n: usize, rng: &mut ChaCha8Rng) -> usize {
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    let better = |x: usize, y: usize| {
        ranked.rank[x] < ranked.rank[y]
            || (ranked.rank[x] == ranked.rank[y] && ranked.crowding[x] > ranked.crowding[y])
    };
    if better(b, a) {
        b
    } else {
        a
    }
}

pub(super) fn run(config: &RunConfig, problem: &Problem<'_>) -> RunHistory {
    let k = problem.n_keywords();
    let n = config.n_nests;
    let mutation_rate = 1.0 / k as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let weights = problem.reference_weights().to_vec();
    let mut rec = Recorder::new(problem);

    let mut pop: Vec<Vec<bool>> = (0..n)
        .map(|_| {
            let mut bits: Vec<bool> = (0..k).map(|_| rng.gen_bool(0.5)).collect();
            ensure_nonempty(&mut bits, &mut rng);
            bits
        })
        .collect();
    let evaluate = |pop: &[Vec<bool>]| -> Vec<Objectives> {
        pop.par_iter()
            .map(|b| problem.evaluate(&combo_of(b), &weights))
            .collect()
    };
    let mut objs = evaluate(&pop);
    for b in &pop {
        rec.offer(&combo_of(b));
    }

    for t in 0..config.iterations {
        let points: Vec<[f64; 2]> = objs.iter().map(Objectives::as_minimization).collect();
        let ranked = rank_population(&points);

        let mut offspring: Vec<Vec<bool>> = Vec::with_capacity(n);
        while offspring.len() < n {
            let p1 = &pop[tournament(&ranked, n, &mut rng)];
            let p2 = &pop[tournament(&ranked, n, &mut rng)];
            let (mut c1, mut c2) = (p1.clone(), p2.clone());
            if rng.gen_bool(CROSSOVER_RATE) {
                for i in 0..k {
                    if rng.gen_bool(0.5) {
                        c1[i] = p2[i];
                        c2[i] = p1[i];
                    }
                }
            }
            for child in [&mut c1, &mut c2] {
                for bit in child.iter_mut() {
                    if rng.gen_bool(mutation_rate) {
                        *bit = !*bit;
                    }
                }
                ensure_nonempty(child, &mut rng);
            }
            offspring.push(c1);
            if offspring.len() < n {
                offspring.push(c2);
            }
        }
        let off_objs = evaluate(&offspring);
        for b in &offspring {
            rec.offer(&combo_of(b));
        }

        let merged: Vec<Vec<bool>> = pop.into_iter().chain(offspring).collect();
        let merged_objs: Vec<Objectives> = objs.into_iter().chain(off_objs).collect();
        let merged_points: Vec<[f64; 2]> = merged_objs
            .iter()
            .map(Objectives::as_minimization)
            .collect();
        let mut survivors = Vec::with_capacity(n);
        for front in fast_non_dominated_sort(&merged_points) {
            if survivors.len() + front.len() <= n {
                survivors.extend(front);
            } else {
                let d = crowding_distance(&merged_points, &front);
                let mut idx: Vec<usize> = (0..front.len()).collect();
                idx.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(front[a].cmp(&front[b])));
                survivors.extend(idx.into_iter().take(n - survivors.len()).map(|j| front[j]));
            }
            if survivors.len() == n {
                break;
            }
        }
        pop = survivors.iter().map(|&i| merged[i].clone()).collect();
        objs = survivors.iter().map(|&i| merged_objs[i]).collect();

        let positions: Vec<Vec<f64>> = pop
            .iter()
            .map(|b| b.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect())
            .collect();
        rec.record(t, population_digest(positions.iter().map(Vec::as_slice)));
    }

    let combos: Vec<Vec<usize>> = pop.iter().map(|b| combo_of(b)).collect();
    rec.finish(config, &combos, weights, Vec::new())
}
