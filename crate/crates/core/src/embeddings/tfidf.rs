use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// `tf * ln(N / (df + 1))`.
pub fn tfidf(tf: f64, df: usize, n_docs: usize) -> f64 {
    tf * (n_docs as f64 / (df as f64 + 1.0)).ln()
}

/// Number of samples each token appears in.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DocumentFrequencies {
    pub doc_freq: BTreeMap<String, usize>,
    pub n_docs: usize,
}

impl DocumentFrequencies {
    pub fn from_samples<S: AsRef<str>>(samples: &[Vec<S>]) -> Self {
        let mut doc_freq = BTreeMap::new();
        for sample in samples {
            let unique: BTreeSet<&str> = sample.iter().map(AsRef::as_ref).collect();
            for tok in unique {
                *doc_freq.entry(tok.to_string()).or_insert(0) += 1;
            }
        }
        Self {
            doc_freq,
            n_docs: samples.len(),
        }
    }

    pub fn df(&self, token: &str) -> usize {
        self.doc_freq.get(token).copied().unwrap_or(0)
    }
}

/// Term frequencies of one sample alongside dataset-wide document frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfStats {
    pub term_freq: BTreeMap<String, f64>,
    pub doc_freq: BTreeMap<String, usize>,
    pub n_docs: usize,
    uniform: bool,
}

impl TfidfStats {
    pub fn for_sample<S: AsRef<str>>(tokens: &[S], df: &DocumentFrequencies) -> Self {
        let mut term_freq = BTreeMap::new();
        for t in tokens {
            *term_freq.entry(t.as_ref().to_string()).or_insert(0.0) += 1.0;
        }
        let doc_freq = term_freq.keys().map(|t| (t.clone(), df.df(t))).collect();
        Self {
            term_freq,
            doc_freq,
            n_docs: df.n_docs,
            uniform: false,
        }
    }

    /// Stats under which every token weighs 1.
    pub fn uniform() -> Self {
        Self {
            term_freq: BTreeMap::new(),
            doc_freq: BTreeMap::new(),
            n_docs: 0,
            uniform: true,
        }
    }

    pub fn weight(&self, token: &str) -> f64 {
        if self.uniform {
            return 1.0;
        }
        let tf = self.term_freq.get(token).copied().unwrap_or(0.0);
        let df = self.doc_freq.get(token).copied().unwrap_or(0);
        tfidf(tf, df, self.n_docs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert_eq!(tfidf(1.0, 9, 10), 0.0);
        assert!((tfidf(2.0, 9, 100) - 2.0 * 10f64.ln()).abs() < 1e-12);
        assert_eq!(tfidf(0.0, 3, 100), 0.0);
    }

    #[test]
    fn stats_from_samples() {
        let samples = vec![vec!["a", "b", "a"], vec!["b"], vec!["c"]];
        let df = DocumentFrequencies::from_samples(&samples);
        assert_eq!(df.df("a"), 1);
        assert_eq!(df.df("b"), 2);
        let s = TfidfStats::for_sample(&samples[0], &df);
        assert!((s.weight("a") - 2.0 * (3.0f64 / 2.0).ln()).abs() < 1e-15);
        assert_eq!(s.weight("b"), 0.0);
        assert_eq!(s.weight("zzz"), 0.0);
    }
}
