//! Token embedding backends and n-gram / TF-IDF aggregation of short text
//! fields into a single feature vector.

mod hash;
mod sgns;
mod table;
mod tfidf;

pub use hash::{hash_embed, HashEmbedder};
pub use sgns::{train_sgns, SgnsConfig};
pub use table::{read_embeddings, write_embeddings, EmbeddingTable};
pub use tfidf::{tfidf, DocumentFrequencies, TfidfStats};

/// Anything that maps a token to a fixed-width vector.
pub trait Embedder: Sync {
    fn dim(&self) -> usize;
    fn embed(&self, token: &str) -> Vec<f64>;
}

/// Lowercase and split on whitespace, trimming punctuation from each end.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// Sliding windows of `n` consecutive tokens. A sequence shorter than `n`
/// yields itself as the only gram.
pub fn ngrams<S: AsRef<str>>(tokens: &[S], n: usize) -> Vec<Vec<String>> {
    let owned: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
    if owned.is_empty() {
        return Vec::new();
    }
    if n == 0 || owned.len() < n {
        return vec![owned];
    }
    owned.windows(n).map(<[String]>::to_vec).collect()
}

pub fn softmax(v: &[f64]) -> Vec<f64> {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|x| (x - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Options for [`aggregate_subcom`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateOptions {
    pub n: usize,
    pub softmax: bool,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        Self {
            n: 2,
            softmax: true,
        }
    }
}

/// TF-IDF weighted mean of n-gram vectors followed by a componentwise softmax.
///
/// A gram's vector and weight are the means of its member tokens' vectors and
/// TF-IDF weights. When the weights cancel to zero the plain mean is used.
pub fn aggregate_subcom<S: AsRef<str>>(
    tokens: &[S],
    embedder: &dyn Embedder,
    stats: &TfidfStats,
    opts: AggregateOptions,
) -> Vec<f64> {
    let dim = embedder.dim();
    let grams = ngrams(tokens, opts.n);
    if grams.is_empty() {
        let zero = vec![0.0; dim];
        return if opts.softmax { softmax(&zero) } else { zero };
    }
    let mut vectors = Vec::with_capacity(grams.len());
    let mut weights = Vec::with_capacity(grams.len());
    for gram in &grams {
        let mut v = vec![0.0; dim];
        let mut w = 0.0;
        for tok in gram {
            for (acc, x) in v.iter_mut().zip(embedder.embed(tok)) {
                *acc += x;
            }
            w += stats.weight(tok);
        }
        let len = gram.len() as f64;
        v.iter_mut().for_each(|x| *x /= len);
        vectors.push(v);
        weights.push(w / len);
    }
    let mut total: f64 = weights.iter().sum();
    if total.abs() < 1e-12 {
        weights.iter_mut().for_each(|w| *w = 1.0);
        total = weights.len() as f64;
    }
    let mut out = vec![0.0; dim];
    for (v, w) in vectors.iter().zip(&weights) {
        for (acc, x) in out.iter_mut().zip(v) {
            *acc += w * x;
        }
    }
    out.iter_mut().for_each(|x| *x /= total);
    if opts.softmax {
        softmax(&out)
    } else {
        out
    }
}

/// Mean of the token vectors of `text`; the zero vector when it has no tokens.
pub fn embed_text(text: &str, embedder: &dyn Embedder) -> Vec<f64> {
    let mut acc = vec![0.0; embedder.dim()];
    let tokens = tokenize(text);
    for t in &tokens {
        for (a, x) in acc.iter_mut().zip(embedder.embed(t)) {
            *a += x;
        }
    }
    if !tokens.is_empty() {
        acc.iter_mut().for_each(|a| *a /= tokens.len() as f64);
    }
    acc
}

pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        None
    } else {
        Some((dot / (na * nb)).clamp(-1.0, 1.0))
    }
}

/// Population standard deviation of all pairwise cosine similarities.
/// Pairs involving a zero vector are skipped.
pub fn similarity_std(vectors: &[Vec<f64>]) -> f64 {
    let mut sims = Vec::new();
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            if let Some(c) = cosine(&vectors[i], &vectors[j]) {
                sims.push(c);
            }
        }
    }
    if sims.is_empty() {
        return 0.0;
    }
    let n = sims.len() as f64;
    let mean = sims.iter().sum::<f64>() / n;
    (sims.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n).sqrt()
}
