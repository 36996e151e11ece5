#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use fgf_core::corpus::{load_offline, Document};
use regex::Regex;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn docs(name: &str) -> Vec<Document> {
    load_offline(fixture(name)).unwrap()
}

/// Whole-word, case-insensitive count by regex.
pub fn regex_count(text: &str, keyword: &str) -> u32 {
    let re = Regex::new(&format!(r"(?i)\b{}\b", regex::escape(keyword))).unwrap();
    re.find_iter(text).count() as u32
}

/// `counts[i][j]`: matches of keyword `i` in document `j`.
pub fn oracle_counts(docs: &[Document], pool: &[String]) -> Vec<Vec<u32>> {
    pool.iter()
        .map(|k| {
            docs.iter()
                .map(|d| regex_count(&format!("{} {}", d.title, d.abstract_text), k))
                .collect()
        })
        .collect()
}

/// Balance and relevance of a combo evaluated literally: population standard
/// deviation of weighted totals, and the per-document double loop.
pub fn oracle_objectives(counts: &[Vec<u32>], weights: &[f64], combo: &[usize]) -> (f64, f64) {
    let m = counts[0].len();
    let xs: Vec<f64> = combo
        .iter()
        .map(|&i| weights[i] * counts[i].iter().map(|&c| c as f64).sum::<f64>())
        .collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
    let w: f64 = combo.iter().map(|&i| weights[i]).sum();
    let mut rel = 0.0;
    for j in 0..m {
        let mut s = 0.0;
        for &i in combo {
            s += counts[i][j] as f64 * weights[i];
        }
        rel += s / w;
    }
    (var.sqrt(), rel / m as f64)
}

/// Keyword-name sets of every non-dominated non-empty combination, by
/// exhausting all subsets.
pub fn true_front(counts: &[Vec<u32>], pool: &[String]) -> BTreeSet<Vec<String>> {
    let k = pool.len();
    let totals: Vec<f64> = counts
        .iter()
        .map(|r| r.iter().map(|&c| c as f64).sum())
        .collect();
    let sum: f64 = totals.iter().sum();
    let weights: Vec<f64> = totals.iter().map(|t| t / sum).collect();
    let all: Vec<(Vec<usize>, (f64, f64))> = (1u32..(1 << k))
        .map(|mask| {
            let combo: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            let obj = oracle_objectives(counts, &weights, &combo);
            (combo, obj)
        })
        .collect();
    const EPS: f64 = 1e-12;
    let dominates = |a: (f64, f64), b: (f64, f64)| {
        a.0 <= b.0 + EPS && a.1 >= b.1 - EPS && (a.0 < b.0 - EPS || a.1 > b.1 + EPS)
    };
    all.iter()
        .filter(|(_, o)| !all.iter().any(|(_, p)| dominates(*p, *o)))
        .map(|(c, _)| c.iter().map(|&i| pool[i].clone()).collect())
        .collect()
}
