//! Domain keyword taxonomy, synonym expansion and frequency-driven weights.
//!
//! A taxonomy is a list of groups, each a base keyword plus its synonyms.
//! Expansion flattens the groups into a case-folded, deduplicated pool in which
//! every base keyword precedes its own synonyms. A token listed under two
//! groups belongs to the first one.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five keyword groups of the shipped default taxonomy.
pub const DEFAULT_TAXONOMY: &str = include_str!("../data/table1_taxonomy.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordGroup {
    pub base: String,
    pub synonyms: Vec<String>,
}

impl KeywordGroup {
    pub fn new<S: Into<String>>(base: S, synonyms: impl IntoIterator<Item = S>) -> Self {
        Self {
            base: base.into(),
            synonyms: synonyms.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeywordTaxonomy {
    groups: Vec<KeywordGroup>,
    pool: Vec<String>,
    group_of: HashMap<String, usize>,
}

fn fold(token: &str) -> String {
    token.trim().to_lowercase()
}

/// Flatten keyword groups into the search pool.
pub fn expand_keywords(groups: &[KeywordGroup]) -> Result<Vec<String>> {
    Ok(expand_with_owners(groups)?.0)
}

fn expand_with_owners(groups: &[KeywordGroup]) -> Result<(Vec<String>, HashMap<String, usize>)> {
    if groups.is_empty() {
        return Err(Error::Config("keyword taxonomy has no groups".into()));
    }
    let mut pool = Vec::new();
    let mut group_of = HashMap::new();
    for (gi, group) in groups.iter().enumerate() {
        for raw in std::iter::once(&group.base).chain(group.synonyms.iter()) {
            let token = fold(raw);
            if token.is_empty() {
                return Err(Error::Config(format!(
                    "empty keyword in group {} ({:?})",
                    gi + 1,
                    group.base
                )));
            }
            if !group_of.contains_key(&token) {
                group_of.insert(token.clone(), gi);
                pool.push(token);
            }
        }
    }
    Ok((pool, group_of))
}

impl KeywordTaxonomy {
    pub fn new(groups: Vec<KeywordGroup>) -> Result<Self> {
        let (pool, group_of) = expand_with_owners(&groups)?;
        Ok(Self {
            groups,
            pool,
            group_of,
        })
    }

    /// Parse the `base: syn1, syn2, ...` table format. Blank lines and lines
    /// starting with `#` are skipped; a line without a colon is a group with no
    /// synonyms.
    pub fn parse(text: &str) -> Result<Self> {
        let mut groups = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (base, rest) = match line.split_once(':') {
                Some((b, r)) => (b.trim(), r),
                None => (line, ""),
            };
            if base.is_empty() {
                return Err(Error::parse(
                    "taxonomy",
                    Some(idx + 1),
                    "missing base keyword",
                ));
            }
            let synonyms = rest
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect();
            groups.push(KeywordGroup {
                base: base.to_string(),
                synonyms,
            });
        }
        Self::new(groups)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// The shipped default taxonomy.
    pub fn default_table() -> Self {
        Self::parse(DEFAULT_TAXONOMY).expect("bundled taxonomy is well-formed")
    }

    /// A taxonomy whose groups are the tokens of `pool`, one group each.
    pub fn from_pool<S: AsRef<str>>(pool: &[S]) -> Result<Self> {
        Self::new(
            pool.iter()
                .map(|t| KeywordGroup {
                    base: t.as_ref().to_string(),
                    synonyms: Vec::new(),
                })
                .collect(),
        )
    }

    pub fn groups(&self) -> &[KeywordGroup] {
        &self.groups
    }

    pub fn pool(&self) -> &[String] {
        &self.pool
    }

    pub fn group_of(&self, token: &str) -> Option<usize> {
        self.group_of.get(&fold(token)).copied()
    }

    pub fn len(&self) -> usize {
        self.pool.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pool.is_empty()
    }
}

/// Normalized keyword weights aligned with a token list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordWeights {
    tokens: Vec<String>,
    values: Vec<f64>,
}

impl KeywordWeights {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.tokens
            .iter()
            .position(|t| t == token)
            .map(|i| self.values[i])
    }
}

/// Frequency normalization `w_k = f_k / sum(f)`. All-zero input yields
/// uniform weights. Negative or non-finite counts are treated as zero.
pub fn normalize_frequencies(frequencies: &[f64]) -> Vec<f64> {
    if frequencies.is_empty() {
        return Vec::new();
    }
    let clean: Vec<f64> = frequencies
        .iter()
        .map(|&f| if f.is_finite() && f > 0.0 { f } else { 0.0 })
        .collect();
    let total: f64 = clean.iter().sum();
    if total > 0.0 {
        clean.iter().map(|f| f / total).collect()
    } else {
        vec![1.0 / clean.len() as f64; clean.len()]
    }
}

/// Dynamic keyword weights from a token -> count map.
pub fn update_weights<S: AsRef<str>>(frequencies: &[(S, f64)]) -> KeywordWeights {
    let counts: Vec<f64> = frequencies.iter().map(|(_, c)| *c).collect();
    KeywordWeights {
        tokens: frequencies
            .iter()
            .map(|(t, _)| t.as_ref().to_string())
            .collect(),
        values: normalize_frequencies(&counts),
    }
}
