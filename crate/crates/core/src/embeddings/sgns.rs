use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EmbeddingTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsConfig {
    pub dim: usize,
    pub window: usize,
    pub min_count: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub field: String,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        Self {
            dim: 100,
            window: 5,
            min_count: 1,
            epochs: 5,
            negatives: 5,
            learning_rate: 0.025,
            seed: 0,
            field: "token".into(),
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Skip-gram with negative sampling, single-threaded so a seed fixes the
/// output exactly. Negatives are drawn from the unigram distribution raised
/// to 0.75; the context window is shrunk at random per center token and the
/// learning rate decays linearly.
pub fn train_sgns<S: AsRef<str>>(corpus: &[Vec<S>], config: &SgnsConfig) -> Result<EmbeddingTable> {
    if config.dim == 0 || config.window == 0 || config.epochs == 0 {
        return Err(Error::Config(
            "dim, window and epochs must be positive".into(),
        ));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for sentence in corpus {
        for tok in sentence {
            *counts.entry(tok.as_ref()).or_insert(0) += 1;
        }
    }
    let mut vocab: Vec<(&str, usize)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= config.min_count.max(1))
        .collect();
    if vocab.is_empty() {
        return Err(Error::Training("empty vocabulary".into()));
    }
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let index: BTreeMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, &(t, _))| (t, i))
        .collect();
    let sentences: Vec<Vec<usize>> = corpus
        .iter()
        .map(|s| {
            s.iter()
                .filter_map(|t| index.get(t.as_ref()).copied())
                .collect()
        })
        .collect();
    let noise = WeightedIndex::new(vocab.iter().map(|&(_, c)| (c as f64).powf(0.75)))
        .map_err(|e| Error::Training(e.to_string()))?;

    let dim = config.dim;
    let v = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut w_in: Vec<f64> = (0..v * dim)
        .map(|_| (rng.gen::<f64>() - 0.5) / dim as f64)
        .collect();
    let mut w_out = vec![0.0; v * dim];
    let mut grad = vec![0.0; dim];

    let total_steps = (config.epochs * sentences.iter().map(Vec::len).sum::<usize>()).max(1) as f64;
    let mut step = 0usize;
    for _ in 0..config.epochs {
        for sentence in &sentences {
            for (pos, &center) in sentence.iter().enumerate() {
                let lr = (config.learning_rate * (1.0 - step as f64 / total_steps))
                    .max(config.learning_rate * 1e-4);
                step += 1;
                let reach = rng.gen_range(1..=config.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(sentence.len() - 1);
                for (cpos, &context) in sentence.iter().enumerate().take(hi + 1).skip(lo) {
                    if cpos == pos {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let input = &w_in[center * dim..(center + 1) * dim];
                    for d in 0..=config.negatives {
                        let (target, label) = if d == 0 {
                            (context, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let out = &mut w_out[target * dim..(target + 1) * dim];
                        let f: f64 = input.iter().zip(out.iter()).map(|(a, b)| a * b).sum();
                        let g = (label - sigmoid(f)) * lr;
                        for k in 0..dim {
                            grad[k] += g * out[k];
                            out[k] += g * input[k];
                        }
                    }
                    for (w, g) in w_in[center * dim..(center + 1) * dim].iter_mut().zip(&grad) {
                        *w += g;
                    }
                }
            }
        }
    }

    let mut table = EmbeddingTable::new(dim, config.field.clone())?;
    for (i, &(tok, _)) in vocab.iter().enumerate() {
        table.insert(tok, w_in[i * dim..(i + 1) * dim].to_vec())?;
    }
    Ok(table)
}
