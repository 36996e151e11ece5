//! Cuckoo search over relaxed keyword positions, with the optional
//! hidden-nest strategy.
//!
//! Per iteration: every nest proposes a candidate; a candidate that dominates
//! its incumbent replaces it, a mutually non-dominated one replaces it on a fair
//! coin; the worst `floor(pa * n)` nests are re-seeded uniformly; search weights
//! are refreshed from keyword usage.
//!
//! With the hidden-nest strategy the best nest by scalarized rank is hidden for
//! the iteration: it proposes nothing, is never abandoned and is put back
//! unchanged. The remaining nests are split by rank: the better half contracts
//! toward the hidden nest with strength `exp(-γ‖B − N‖)`, the worse half takes a
//! Lévy step scaled by `ε·α`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    combo_from_position, levy_step, nest_rngs, population_digest, scalarized_order,
    uniform_position, usage_weights, HiddenNest, Objectives, Problem, Recorder, RunConfig,
    RunHistory,
};

enum Move {
    Levy { scale: f64 },
    Contract { toward: Vec<f64> },
}

fn propose(x: &[f64], mv: &Move, config: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match mv {
        Move::Levy { scale } => {
            let step = levy_step(config.beta, *scale, x.len(), rng);
            x.iter()
                .zip(step)
                .map(|(xi, s)| (xi + s).clamp(0.0, 1.0))
                .collect()
        }
        Move::Contract { toward } => {
            let dist = x
                .iter()
                .zip(toward)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            let strength = if dist == 0.0 {
                0.0
            } else {
                (-config.hncsa_gamma * dist).exp()
            };
            x.iter()
                .zip(toward)
                .map(|(xi, bi)| {
                    let r: f64 = rng.gen();
                    (xi + strength * r * (bi - xi)).clamp(0.0, 1.0)
                })
                .collect()
        }
    }
}

fn evaluate_all(problem: &Problem<'_>, combos: &[Vec<usize>], weights: &[f64]) -> Vec<Objectives> {
    combos
        .par_iter()
        .map(|c| problem.evaluate(c, weights))
        .collect()
}

pub(super) fn run(config: &RunConfig, problem: &Problem<'_>, hidden_nest: bool) -> RunHistory {
    let k = problem.n_keywords();
    let n = config.n_nests;
    let mut rngs = nest_rngs(config.seed, n);
    let mut xs: Vec<Vec<f64>> = rngs.iter_mut().map(|r| uniform_position(k, r)).collect();
    let mut combos: Vec<Vec<usize>> = xs.iter().map(|x| combo_from_position(x)).collect();
    let mut weights = usage_weights(&combos, k);
    let mut objs = evaluate_all(problem, &combos, &weights);

    let mut rec = Recorder::new(problem);
    for c in &combos {
        rec.offer(c);
    }
    let mut hidden_log = Vec::new();
    let n_abandon = (config.pa * n as f64).floor() as usize;

    for t in 0..config.iterations {
        let order = scalarized_order(&objs, &combos);
        let hidden = hidden_nest.then(|| order[0]);

        let mut moves: Vec<Option<Move>> = (0..n).map(|_| None).collect();
        match hidden {
            Some(b) => {
                hidden_log.push(HiddenNest {
                    iteration: t,
                    nest: b,
                    combo: problem.combo_names(&combos[b]),
                });
                let rest: Vec<usize> = order[1..].to_vec();
                let n_exploit = rest.len() / 2;
                for (pos, &i) in rest.iter().enumerate() {
                    moves[i] = Some(if pos < n_exploit {
                        Move::Contract {
                            toward: xs[b].clone(),
                        }
                    } else {
                        Move::Levy {
                            scale: config.hncsa_eps * config.alpha,
                        }
                    });
                }
            }
            None => {
                for m in moves.iter_mut() {
                    *m = Some(Move::Levy {
                        scale: config.alpha,
                    });
                }
            }
        }

        // candidates, drawn sequentially from per-nest streams
        let candidates: Vec<Option<Vec<f64>>> = moves
            .iter()
            .zip(rngs.iter_mut())
            .zip(&xs)
            .map(|((mv, rng), x)| mv.as_ref().map(|mv| propose(x, mv, config, rng)))
            .collect();
        let cand_combos: Vec<Option<Vec<usize>>> = candidates
            .iter()
            .map(|c| c.as_ref().map(|x| combo_from_position(x)))
            .collect();
        let cand_objs: Vec<Option<Objectives>> = cand_combos
            .par_iter()
            .map(|c| c.as_ref().map(|c| problem.evaluate(c, &weights)))
            .collect();

        for i in 0..n {
            let (Some(x), Some(c), Some(o)) = (&candidates[i], &cand_combos[i], cand_objs[i])
            else {
                continue;
            };
            rec.offer(c);
            let replace = if o.dominates(&objs[i]) {
                true
            } else if objs[i].dominates(&o) {
                false
            } else {
                rngs[i].gen_bool(0.5)
            };
            if replace {
                xs[i] = x.clone();
                combos[i] = c.clone();
                objs[i] = o;
            }
        }

        // abandon the worst nests
        let order = scalarized_order(&objs, &combos);
        let abandoned: Vec<usize> = order
            .iter()
            .rev()
            .copied()
            .filter(|&i| Some(i) != hidden)
            .take(n_abandon)
            .collect();
        for &i in &abandoned {
            xs[i] = uniform_position(k, &mut rngs[i]);
            combos[i] = combo_from_position(&xs[i]);
            rec.offer(&combos[i]);
        }

        weights = usage_weights(&combos, k);
        objs = evaluate_all(problem, &combos, &weights);
        rec.record(t, population_digest(xs.iter().map(Vec::as_slice)));
    }

    rec.finish(config, &combos, weights, hidden_log)
}
