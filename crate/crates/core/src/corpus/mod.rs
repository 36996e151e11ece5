//! Document acquisition, deduplication and keyword match profiles.

mod arxiv;

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use arxiv::{
    build_query, cache_dir_from_env, parse_feed, ArxivClient, HttpTransport, Transport,
    ARXIV_ENDPOINT, CACHE_DIR_ENV,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Arxiv,
    #[default]
    Offline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub pdf_url: String,
    #[serde(default)]
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relevant: Option<bool>,
}

impl Document {
    /// Title and abstract joined, the text keywords are matched against.
    pub fn text(&self) -> String {
        format!("{} {}", self.title, self.abstract_text)
    }
}

#[derive(Deserialize)]
struct OfflineRecord {
    id: String,
    title: String,
    #[serde(rename = "abstract")]
    abstract_text: String,
    pdf_url: String,
    #[serde(default)]
    relevant: Option<bool>,
}

/// Parse the line-delimited JSON corpus format.
pub fn parse_offline(reader: impl BufRead, source_name: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(source_name, Some(lineno), e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: OfflineRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(source_name, Some(lineno), e.to_string()))?;
        if rec.title.trim().is_empty() {
            return Err(Error::parse(source_name, Some(lineno), "empty title"));
        }
        if !ids.insert(rec.id.clone()) {
            return Err(Error::parse(
                source_name,
                Some(lineno),
                format!("duplicate document id {:?}", rec.id),
            ));
        }
        docs.push(Document {
            id: rec.id,
            title: rec.title,
            abstract_text: rec.abstract_text,
            pdf_url: rec.pdf_url,
            source: Source::Offline,
            relevant: rec.relevant,
        });
    }
    Ok(docs)
}

pub fn load_offline(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_offline(BufReader::new(file), &path.display().to_string())
}

/// Write documents in the offline record format (the inverse of [`load_offline`]).
pub fn write_offline(docs: &[Document], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for d in docs {
        let mut value = serde_json::json!({
            "id": d.id,
            "title": d.title,
            "abstract": d.abstract_text,
            "pdf_url": d.pdf_url,
        });
        if let Some(r) = d.relevant {
            value["relevant"] = serde_json::Value::Bool(r);
        }
        serde_json::to_writer(&mut out, &value)?;
        out.push(b'\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&out).map_err(|e| Error::io(path, e))
}

/// Case-fold and collapse runs of whitespace.
pub fn normalize_text(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

fn content_hash(doc: &Document) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(normalize_text(&doc.title).as_bytes());
    h.update([0u8]);
    h.update(normalize_text(&doc.abstract_text).as_bytes());
    h.finalize().into()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DedupReport {
    pub input: usize,
    pub kept: usize,
    pub removed: usize,
    /// Fraction of the input that duplicated an earlier document.
    pub duplication_rate: f64,
}

/// Drop documents whose normalized (title, abstract) hash matches an earlier one.
pub fn dedup(docs: &[Document]) -> Vec<Document> {
    dedup_with_report(docs).0
}

pub fn dedup_with_report(docs: &[Document]) -> (Vec<Document>, DedupReport) {
    let mut seen = HashSet::new();
    let kept: Vec<Document> = docs
        .iter()
        .filter(|d| seen.insert(content_hash(d)))
        .cloned()
        .collect();
    let removed = docs.len() - kept.len();
    let report = DedupReport {
        input: docs.len(),
        kept: kept.len(),
        removed,
        duplication_rate: if docs.is_empty() {
            0.0
        } else {
            removed as f64 / docs.len() as f64
        },
    };
    (kept, report)
}

/// Keyword-by-document occurrence counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchProfile {
    keywords: Vec<String>,
    doc_ids: Vec<String>,
    /// Row-major, one row per keyword.
    counts: Vec<Vec<u32>>,
}

impl MatchProfile {
    pub fn from_counts(
        keywords: Vec<String>,
        doc_ids: Vec<String>,
        counts: Vec<Vec<u32>>,
    ) -> Result<Self> {
        if counts.len() != keywords.len() || counts.iter().any(|r| r.len() != doc_ids.len()) {
            return Err(Error::Shape(format!(
                "match matrix must be {} x {}",
                keywords.len(),
                doc_ids.len()
            )));
        }
        Ok(Self {
            keywords,
            doc_ids,
            counts,
        })
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn n_keywords(&self) -> usize {
        self.keywords.len()
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn count(&self, keyword: usize, doc: usize) -> u32 {
        self.counts[keyword][doc]
    }

    pub fn row(&self, keyword: usize) -> &[u32] {
        &self.counts[keyword]
    }

    /// Total matches of each keyword across the corpus.
    pub fn totals(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|r| r.iter().map(|&c| c as f64).sum())
            .collect()
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Whole-word, case-insensitive occurrences of `keyword` in `text`.
pub fn count_occurrences(text: &str, keyword: &str) -> u32 {
    let needle = keyword.trim().to_lowercase();
    if needle.is_empty() {
        return 0;
    }
    let hay = text.to_lowercase();
    let mut n = 0;
    let mut from = 0;
    while let Some(pos) = hay[from..].find(&needle) {
        let start = from + pos;
        let end = start + needle.len();
        let before_ok = hay[..start]
            .chars()
            .next_back()
            .is_none_or(|c| !is_word_char(c));
        let after_ok = hay[end..].chars().next().is_none_or(|c| !is_word_char(c));
        if before_ok && after_ok {
            n += 1;
            from = end;
        } else {
            // advance one char past the match start
            from = start + hay[start..].chars().next().map_or(1, char::len_utf8);
        }
    }
    n
}

/// Ids of documents matching at least one keyword of `combo` (pool indices).
pub fn retrieve(profile: &MatchProfile, combo: &[usize]) -> Vec<String> {
    (0..profile.n_docs())
        .filter(|&j| combo.iter().any(|&k| profile.count(k, j) > 0))
        .map(|j| profile.doc_ids()[j].clone())
        .collect()
}

pub fn match_counts<S: AsRef<str>>(docs: &[Document], pool: &[S]) -> Result<MatchProfile> {
    if pool.is_empty() {
        return Err(Error::Config("keyword pool is empty".into()));
    }
    let texts: Vec<String> = docs.iter().map(Document::text).collect();
    let counts = pool
        .iter()
        .map(|kw| {
            texts
                .iter()
                .map(|t| count_occurrences(t, kw.as_ref()))
                .collect()
        })
        .collect();
    Ok(MatchProfile {
        keywords: pool.iter().map(|k| k.as_ref().to_string()).collect(),
        doc_ids: docs.iter().map(|d| d.id.clone()).collect(),
        counts,
    })
}
