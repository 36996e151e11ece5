//! Keyword-combination search: classic cuckoo search, the hidden-nest
//! variant, and an NSGA-II baseline.
//!
//! A nest is a point `x` in `[0,1]^K` over the keyword pool; its combination
//! is the set of keywords with `x_k >= 0.5` (the largest coordinate is forced
//! on when nothing passes the threshold). During a cuckoo run, fitness uses
//! weights refreshed every iteration from how often each keyword appears in
//! the population. Every evaluated combination is also scored under fixed
//! reference weights (normalized corpus-wide match totals) and offered to a
//! Pareto archive. The archive is what a run reports as its front, so fronts
//! of different iterations, algorithms and seeds are comparable.

mod archive;
mod cuckoo;
mod fitness;
mod levy;
mod nsga2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{match_counts, Document, MatchProfile};
use crate::error::{Error, Result};
use crate::keywords::{normalize_frequencies, KeywordTaxonomy};

pub use archive::ParetoArchive;
pub use fitness::{fitness_balance, fitness_relevance, Objectives};
pub use levy::{levy_step, mantegna_sigma};
pub use nsga2::{crowding_distance, fast_non_dominated_sort};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Csa,
    Hncsa,
    Nsga2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Hncsa, Algorithm::Csa, Algorithm::Nsga2];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Csa => "csa",
            Algorithm::Hncsa => "hncsa",
            Algorithm::Nsga2 => "nsga2",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csa" => Ok(Algorithm::Csa),
            "hncsa" | "hn-csa" => Ok(Algorithm::Hncsa),
            "nsga2" | "nsga-ii" => Ok(Algorithm::Nsga2),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algo: Algorithm,
    pub n_nests: usize,
    pub iterations: usize,
    /// Discovery (abandonment) probability.
    pub pa: f64,
    /// Step scale.
    pub alpha: f64,
    /// Lévy index.
    pub beta: f64,
    pub seed: u64,
    /// Exploitation decay of the hidden-nest update.
    pub hncsa_gamma: f64,
    /// Exploration perturbation scale of the hidden-nest update.
    pub hncsa_eps: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algo: Algorithm::Hncsa,
            n_nests: 25,
            iterations: 100,
            pa: 0.25,
            alpha: 0.01,
            beta: 1.5,
            seed: 0,
            hncsa_gamma: 1.0,
            hncsa_eps: 1.0,
        }
    }
}

impl RunConfig {
    pub fn with_algo(mut self, algo: Algorithm) -> Self {
        self.algo = algo;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.pa > 0.0 && self.pa < 1.0) {
            return bad(format!("pa must lie in (0,1), got {}", self.pa));
        }
        if !(self.beta > 1.0 && self.beta <= 2.0) {
            return bad(format!("beta must lie in (1,2], got {}", self.beta));
        }
        if self.iterations < 1 {
            return bad("iterations must be at least 1".into());
        }
        if self.n_nests < 2 {
            return bad(format!("n_nests must be at least 2, got {}", self.n_nests));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!(
                "alpha must be finite and non-negative, got {}",
                self.alpha
            ));
        }
        if !(self.hncsa_gamma >= 0.0) || !(self.hncsa_eps >= 0.0 && self.hncsa_eps.is_finite()) {
            return bad("hncsa_gamma and hncsa_eps must be non-negative".into());
        }
        Ok(())
    }
}

/// One candidate keyword combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Nest {
    pub x: Vec<f64>,
    pub combo: Vec<usize>,
    pub objectives: Objectives,
}

/// Keyword indices selected by a relaxed position.
pub fn combo_from_position(x: &[f64]) -> Vec<usize> {
    let combo: Vec<usize> = (0..x.len()).filter(|&k| x[k] >= 0.5).collect();
    if combo.is_empty() && !x.is_empty() {
        let mut best = 0;
        for k in 1..x.len() {
            if x[k] > x[best] {
                best = k;
            }
        }
        return vec![best];
    }
    combo
}

/// Evaluation context shared by all algorithms.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    profile: &'a MatchProfile,
    totals: Vec<f64>,
    reference_weights: Vec<f64>,
}

impl<'a> Problem<'a> {
    pub fn new(profile: &'a MatchProfile) -> Result<Self> {
        if profile.n_keywords() == 0 {
            return Err(Error::Config("keyword pool is empty".into()));
        }
        if profile.n_docs() == 0 {
            return Err(Error::Evaluation("corpus is empty".into()));
        }
        let totals = profile.totals();
        let reference_weights = normalize_frequencies(&totals);
        Ok(Self {
            profile,
            totals,
            reference_weights,
        })
    }

    pub fn profile(&self) -> &MatchProfile {
        self.profile
    }

    pub fn n_keywords(&self) -> usize {
        self.totals.len()
    }

    /// Weights from corpus-wide match totals, used for reported fronts.
    pub fn reference_weights(&self) -> &[f64] {
        &self.reference_weights
    }

    pub fn evaluate(&self, combo: &[usize], weights: &[f64]) -> Objectives {
        Objectives {
            f1: fitness::balance_from_totals(combo, &self.totals, weights),
            f2: fitness::relevance_from_totals(combo, &self.totals, weights, self.profile.n_docs()),
        }
    }

    pub fn evaluate_reference(&self, combo: &[usize]) -> Objectives {
        self.evaluate(combo, &self.reference_weights)
    }

    pub fn combo_names(&self, combo: &[usize]) -> Vec<String> {
        combo
            .iter()
            .map(|&i| self.profile.keywords()[i].clone())
            .collect()
    }
}

/// Per-keyword frequency in the population, add-one smoothed, normalized.
pub fn usage_weights(combos: &[Vec<usize>], n_keywords: usize) -> Vec<f64> {
    let mut freq = vec![1.0; n_keywords];
    for c in combos {
        for &k in c {
            freq[k] += 1.0;
        }
    }
    normalize_frequencies(&freq)
}

/// Indices ordered best first by `rank(f2) - rank(f1)`, where each rank counts
/// strictly smaller values; ties go to lower `f1`, then the lexicographically
/// smaller combination, then the lower index.
pub fn scalarized_order(objectives: &[Objectives], combos: &[Vec<usize>]) -> Vec<usize> {
    let n = objectives.len();
    let score: Vec<i64> = (0..n)
        .map(|i| {
            let r2 = objectives
                .iter()
                .filter(|o| o.f2 < objectives[i].f2)
                .count() as i64;
            let r1 = objectives
                .iter()
                .filter(|o| o.f1 < objectives[i].f1)
                .count() as i64;
            r2 - r1
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        score[b]
            .cmp(&score[a])
            .then(objectives[a].f1.total_cmp(&objectives[b].f1))
            .then_with(|| combos[a].cmp(&combos[b]))
            .then(a.cmp(&b))
    });
    order
}

pub(crate) fn nest_rngs(seed: u64, n: usize) -> Vec<ChaCha8Rng> {
    (0..n)
        .map(|i| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(i as u64 + 1);
            r
        })
        .collect()
}

pub(crate) fn uniform_position<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    (0..k).map(|_| rng.gen::<f64>()).collect()
}

pub(crate) fn population_digest<'x>(positions: impl Iterator<Item = &'x [f64]>) -> String {
    let mut h = Sha256::new();
    for x in positions {
        for v in x {
            h.update(v.to_bits().to_le_bytes());
        }
        h.update([0xff]);
    }
    hex::encode(&h.finalize()[..8])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub combo: Vec<String>,
    pub f1: f64,
    pub f2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Smallest balance value seen so far (reference weights).
    pub best_f1: f64,
    /// Largest relevance value seen so far (reference weights).
    pub best_f2: f64,
    pub best_combo: Vec<String>,
    pub front_size: usize,
    pub population_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenNest {
    pub iteration: usize,
    pub nest: usize,
    pub combo: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    pub algo: Algorithm,
    pub config: RunConfig,
    pub seed: u64,
    pub keywords: Vec<String>,
    pub reference_weights: Vec<f64>,
    pub final_search_weights: Vec<f64>,
    pub evaluations: usize,
    pub iterations: Vec<IterationRecord>,
    pub hidden_nests: Vec<HiddenNest>,
    /// Final population under reference weights.
    pub final_population: Vec<Solution>,
    /// Non-dominated archive under reference weights, sorted by `f1`.
    pub front: Vec<Solution>,
}

impl RunHistory {
    pub fn front_objectives(&self) -> Vec<Objectives> {
        self.front
            .iter()
            .map(|s| Objectives { f1: s.f1, f2: s.f2 })
            .collect()
    }
}

pub(crate) struct Recorder<'p, 'a> {
    problem: &'p Problem<'a>,
    pub archive: ParetoArchive,
    pub iterations: Vec<IterationRecord>,
    pub evaluations: usize,
}

impl<'p, 'a> Recorder<'p, 'a> {
    pub fn new(problem: &'p Problem<'a>) -> Self {
        Self {
            problem,
            archive: ParetoArchive::default(),
            iterations: Vec::new(),
            evaluations: 0,
        }
    }

    pub fn offer(&mut self, combo: &[usize]) {
        self.evaluations += 1;
        let obj = self.problem.evaluate_reference(combo);
        self.archive.insert(combo, obj);
    }

    pub fn record(&mut self, iteration: usize, digest: String) {
        let (best_combo, best) = self.archive.best_relevance().expect("archive is non-empty");
        let best_f1 = self.archive.min_balance().expect("archive is non-empty");
        self.iterations.push(IterationRecord {
            iteration,
            best_f1,
            best_f2: best.f2,
            best_combo: self.problem.combo_names(best_combo),
            front_size: self.archive.len(),
            population_digest: digest,
        });
    }

    pub fn finish(
        self,
        config: &RunConfig,
        final_combos: &[Vec<usize>],
        final_search_weights: Vec<f64>,
        hidden_nests: Vec<HiddenNest>,
    ) -> RunHistory {
        let problem = self.problem;
        let to_solution = |c: &[usize], o: Objectives| Solution {
            combo: problem.combo_names(c),
            f1: o.f1,
            f2: o.f2,
        };
        RunHistory {
            algo: config.algo,
            config: config.clone(),
            seed: config.seed,
            keywords: problem.profile.keywords().to_vec(),
            reference_weights: problem.reference_weights.clone(),
            final_search_weights,
            evaluations: self.evaluations,
            iterations: self.iterations,
            hidden_nests,
            final_population: final_combos
                .iter()
                .map(|c| to_solution(c, problem.evaluate_reference(c)))
                .collect(),
            front: self
                .archive
                .sorted()
                .into_iter()
                .map(|(c, o)| to_solution(c, o))
                .collect(),
        }
    }
}

/// Run the configured algorithm over a match profile.
pub fn run(config: &RunConfig, profile: &MatchProfile) -> Result<RunHistory> {
    config.validate()?;
    let problem = Problem::new(profile)?;
    Ok(match config.algo {
        Algorithm::Csa => cuckoo::run(config, &problem, false),
        Algorithm::Hncsa => cuckoo::run(config, &problem, true),
        Algorithm::Nsga2 => nsga2::run(config, &problem),
    })
}

pub fn run_csa(config: &RunConfig, profile: &MatchProfile) -> Result<RunHistory> {
    run(&config.clone().with_algo(Algorithm::Csa), profile)
}

pub fn run_hncsa(config: &RunConfig, profile: &MatchProfile) -> Result<RunHistory> {
    run(&config.clone().with_algo(Algorithm::Hncsa), profile)
}

pub fn run_nsga2(config: &RunConfig, profile: &MatchProfile) -> Result<RunHistory> {
    run(&config.clone().with_algo(Algorithm::Nsga2), profile)
}

/// Match a corpus against a taxonomy's pool and run.
pub fn run_on_corpus(
    config: &RunConfig,
    docs: &[Document],
    taxonomy: &KeywordTaxonomy,
) -> Result<RunHistory> {
    let profile = match_counts(docs, taxonomy.pool())?;
    run(config, &profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_and_forced_keyword() {
        assert_eq!(combo_from_position(&[0.2, 0.5, 0.9]), vec![1, 2]);
        assert_eq!(combo_from_position(&[0.2, 0.4, 0.1]), vec![1]);
    }

    #[test]
    fn scalarized_order_prefers_high_relevance_low_balance() {
        let objs = [
            Objectives { f1: 1.0, f2: 1.0 },
            Objectives { f1: 0.0, f2: 2.0 },
            Objectives { f1: 0.5, f2: 1.5 },
        ];
        let combos = vec![vec![0], vec![1], vec![2]];
        assert_eq!(scalarized_order(&objs, &combos), vec![1, 2, 0]);
    }

    #[test]
    fn config_bounds() {
        assert!(RunConfig::default().validate().is_ok());
        for bad in [
            RunConfig {
                pa: 1.0,
                ..Default::default()
            },
            RunConfig {
                beta: 1.0,
                ..Default::default()
            },
            RunConfig {
                iterations: 0,
                ..Default::default()
            },
            RunConfig {
                n_nests: 1,
                ..Default::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))));
        }
    }

    #[test]
    fn usage_weights_sum_to_one() {
        let w = usage_weights(&[vec![0, 1], vec![1]], 3);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(w, vec![2.0 / 6.0, 3.0 / 6.0, 1.0 / 6.0]);
    }
}
