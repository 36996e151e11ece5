use serde::{Deserialize, Serialize};

use crate::corpus::count_occurrences;
use crate::embeddings::{cosine, softmax, Embedder};
use crate::error::{Error, Result};

pub const DEFAULT_VERBS: [&str; 12] = [
    "inspect", "replace", "repair", "switch", "restart", "monitor", "isolate", "test", "weld",
    "adjust", "record", "dispatch",
];

/// Sigmoid of the depth gap: `1 / (1 + exp(d_sub - d_com))`.
pub fn weight_hierarchy(d_sub: f64, d_com: f64) -> f64 {
    1.0 / (1.0 + (d_sub - d_com).exp())
}

/// Normalization scope of the attention softmax.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttentionScope {
    /// One softmax over every score in the matrix.
    #[default]
    Global,
    /// A softmax per query row; every row then sums to one.
    Row,
}

/// Scaled dot-product attention matrix between mode (queries) and reason
/// (keys) vectors.
pub fn attention_matrix(
    mode: &[Vec<f64>],
    reason: &[Vec<f64>],
    scope: AttentionScope,
) -> Result<Vec<Vec<f64>>> {
    if mode.len() != reason.len() {
        return Err(Error::Shape(format!(
            "{} mode vectors vs {} reason vectors",
            mode.len(),
            reason.len()
        )));
    }
    let Some(first) = mode.first() else {
        return Ok(Vec::new());
    };
    let dk = first.len();
    if dk == 0 {
        return Err(Error::Shape("attention key dimension is 0".into()));
    }
    if mode.iter().chain(reason).any(|v| v.len() != dk) {
        return Err(Error::Shape(format!(
            "attention vectors must all have length {dk}"
        )));
    }
    let scale = (dk as f64).sqrt();
    let scores: Vec<Vec<f64>> = mode
        .iter()
        .map(|q| {
            reason
                .iter()
                .map(|k| q.iter().zip(k).map(|(a, b)| a * b).sum::<f64>() / scale)
                .collect()
        })
        .collect();
    Ok(match scope {
        AttentionScope::Row => scores.iter().map(|r| softmax(r)).collect(),
        AttentionScope::Global => {
            let n = scores.len();
            let flat: Vec<f64> = scores.into_iter().flatten().collect();
            softmax(&flat).chunks(n).map(<[f64]>::to_vec).collect()
        }
    })
}

/// Per-record attention weight: row sums of the attention matrix scaled so
/// the largest is 1.
pub fn weight_attention(
    mode: &[Vec<f64>],
    reason: &[Vec<f64>],
    scope: AttentionScope,
) -> Result<Vec<f64>> {
    let a = attention_matrix(mode, reason, scope)?;
    let sums: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let max = sums.iter().copied().fold(0.0, f64::max);
    if sums.is_empty() {
        return Ok(sums);
    }
    Ok(sums.iter().map(|s| s / max).collect())
}

/// Action vector for one decision text: the mean embedding of lexicon verbs
/// it contains, or `fallback` when none occur.
pub fn action_vector(
    text: &str,
    fallback: &[f64],
    lexicon: &[String],
    embedder: &dyn Embedder,
) -> Vec<f64> {
    let mut acc = vec![0.0; embedder.dim()];
    let mut hits = 0usize;
    for verb in lexicon {
        if count_occurrences(text, verb) > 0 {
            for (a, x) in acc.iter_mut().zip(embedder.embed(verb)) {
                *a += x;
            }
            hits += 1;
        }
    }
    if hits == 0 {
        return fallback.to_vec();
    }
    acc.iter_mut().for_each(|a| *a /= hits as f64);
    acc
}

/// Verb-similarity weight per record: row sums of the cosine matrix between
/// action vectors and effect vectors, negative sums clipped to zero, divided
/// by the largest sum.
pub fn weight_verbs(
    decision_texts: &[String],
    decision_vecs: &[Vec<f64>],
    effect_vecs: &[Vec<f64>],
    lexicon: &[String],
    embedder: &dyn Embedder,
) -> Result<Vec<f64>> {
    let n = decision_texts.len();
    if decision_vecs.len() != n || effect_vecs.len() != n {
        return Err(Error::Shape(format!(
            "{n} decision texts, {} decision vectors, {} effect vectors",
            decision_vecs.len(),
            effect_vecs.len()
        )));
    }
    if lexicon.is_empty() {
        return Err(Error::Config("verb lexicon is empty".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let dim = effect_vecs[0].len();
    if embedder.dim() != dim
        || decision_vecs
            .iter()
            .chain(effect_vecs)
            .any(|v| v.len() != dim)
    {
        return Err(Error::Shape(format!(
            "verb embedder width {} and all decision/effect vectors must share width {dim}",
            embedder.dim()
        )));
    }
    let actions: Vec<Vec<f64>> = decision_texts
        .iter()
        .zip(decision_vecs)
        .map(|(t, d)| action_vector(t, d, lexicon, embedder))
        .collect();
    let sums: Vec<f64> = actions
        .iter()
        .map(|v| {
            effect_vecs
                .iter()
                .map(|e| cosine(v, e).unwrap_or(0.0))
                .sum::<f64>()
                .max(0.0)
        })
        .collect();
    let max = sums.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::Evaluation(
            "verb similarity row sums are all non-positive; cannot normalize".into(),
        ));
    }
    Ok(sums.iter().map(|s| s / max).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::HashEmbedder;

    #[test]
    fn hierarchy_values() {
        assert_eq!(weight_hierarchy(2.0, 2.0), 0.5);
        assert!((weight_hierarchy(1.0, 2.0) - 0.731_058_578_630_004_9).abs() < 1e-12);
        assert!(weight_hierarchy(0.0, 800.0) == 1.0);
    }

    #[test]
    fn singleton_attention() {
        assert_eq!(
            weight_attention(
                &[vec![0.3, 1.0]],
                &[vec![2.0, -1.0]],
                AttentionScope::Global
            )
            .unwrap(),
            vec![1.0]
        );
    }

    #[test]
    fn row_scope_is_flat() {
        let m = vec![vec![1.0, 0.0], vec![0.0, 3.0], vec![2.0, 2.0]];
        let r = vec![vec![0.5, 0.1], vec![1.0, -1.0], vec![0.0, 2.0]];
        let w = weight_attention(&m, &r, AttentionScope::Row).unwrap();
        assert!(w.iter().all(|x| (x - 1.0).abs() < 1e-12));
        let g = weight_attention(&m, &r, AttentionScope::Global).unwrap();
        assert!(g.iter().any(|x| *x < 0.99));
    }

    #[test]
    fn zero_width_keys() {
        assert!(weight_attention(&[vec![]], &[vec![]], AttentionScope::Global).is_err());
    }

    #[test]
    fn parallel_action_single_record() {
        let e = HashEmbedder::new(8, 1);
        let lex = vec!["repair".to_string()];
        let effect = vec![e.embed("repair")];
        let w = weight_verbs(
            &["Repair the pump".into()],
            &[vec![0.0; 8]],
            &effect,
            &lex,
            &e,
        )
        .unwrap();
        assert_eq!(w, vec![1.0]);
    }

    #[test]
    fn fallback_uses_decision_vector() {
        let e = HashEmbedder::new(4, 1);
        let lex = vec!["weld".to_string()];
        let fb = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(action_vector("no verbs here", &fb, &lex, &e), fb);
    }
}
