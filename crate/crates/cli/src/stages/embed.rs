use std::collections::BTreeMap;

use fgf_core::embeddings::{
    aggregate_subcom, embed_text, read_embeddings, similarity_std, tokenize, train_sgns,
    AggregateOptions, DocumentFrequencies, EmbeddingTable, HashEmbedder, SgnsConfig, TfidfStats,
};
use fgf_core::fusion::{Field, DEFAULT_VERBS};
use fgf_core::graphset::FailureRecord;
use serde::{Deserialize, Serialize};

use super::{paths, records};
use crate::artifacts::Stage;
use crate::config::{EmbedConfig, Loaded};
use crate::failure::Failure;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSummary {
    pub dim: usize,
    pub rows: usize,
    pub backend: String,
    pub zero_rows: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EmbedReport {
    pub vocabulary: usize,
    pub fields: BTreeMap<String, FieldSummary>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepPoint {
    pub dim: usize,
    pub similarity_std: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
}

/// Sentences the word-level model is trained on: every text field of every
/// record.
pub fn training_sentences(records: &[FailureRecord]) -> Vec<Vec<String>> {
    records
        .iter()
        .flat_map(|r| {
            [
                &r.subsystem,
                &r.component,
                &r.failure_mode,
                &r.failure_reason,
                &r.failure_effect,
                &r.emergency_measure,
            ]
        })
        .map(|t| tokenize(t))
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn sgns_config(cfg: &EmbedConfig, dim: usize, seed: u64) -> SgnsConfig {
    SgnsConfig {
        dim,
        window: cfg.sgns_window,
        epochs: cfg.sgns_epochs,
        negatives: cfg.sgns_negatives,
        seed,
        field: "token".into(),
        ..SgnsConfig::default()
    }
}

/// TF-IDF weighted n-gram aggregate of each text over a token table, keyed
/// by record id.
pub fn aggregate_texts(
    ids: &[String],
    texts: &[String],
    tokens: &EmbeddingTable,
    cfg: &EmbedConfig,
    field: &str,
) -> Result<EmbeddingTable, Failure> {
    let samples: Vec<Vec<String>> = texts.iter().map(|t| tokenize(t)).collect();
    let df = DocumentFrequencies::from_samples(&samples);
    let opts = AggregateOptions {
        n: cfg.ngram,
        softmax: cfg.softmax,
    };
    let mut table = EmbeddingTable::new(tokens.dim(), field)?;
    for (id, sample) in ids.iter().zip(&samples) {
        let stats = TfidfStats::for_sample(sample, &df);
        table.insert(id.clone(), aggregate_subcom(sample, tokens, &stats, opts))?;
    }
    Ok(table)
}

fn zero_rows(table: &EmbeddingTable) -> Vec<String> {
    table
        .iter()
        .filter(|(_, v)| v.iter().all(|x| *x == 0.0))
        .map(|(k, _)| k.to_string())
        .collect()
}

fn field_text(r: &FailureRecord, field: Field) -> &str {
    match field {
        Field::SubCom => &r.subsystem,
        Field::Mode => &r.failure_mode,
        Field::Reason => &r.failure_reason,
        Field::Decision => &r.emergency_measure,
        Field::Effect => &r.failure_effect,
    }
}

/// Rows of an external table for exactly the given ids.
fn restrict(
    table: &EmbeddingTable,
    ids: &[String],
    field: &str,
    source: &str,
) -> Result<EmbeddingTable, Failure> {
    let mut out = EmbeddingTable::new(table.dim(), field)?;
    let mut missing = Vec::new();
    for id in ids {
        match table.get(id) {
            Some(v) => out.insert(id.clone(), v.to_vec())?,
            None => missing.push(id.as_str()),
        }
    }
    if !missing.is_empty() {
        return Err(Failure::data(format!(
            "{source} has no {field} vector for {} record(s), first {}",
            missing.len(),
            missing[0]
        )));
    }
    Ok(out)
}

pub fn embed(loaded: &Loaded, sweep: bool) -> Result<(), Failure> {
    let mut stage = Stage::new("embed", loaded);
    loaded.seed("embed")?;
    let seed = stage.stage_seed().expect("seed checked");
    let cfg = &loaded.config.embed;
    let records = records(&mut stage)?;
    let ids: Vec<String> = records.iter().map(|r| r.id.to_string()).collect();
    let sentences = training_sentences(&records);

    let tokens = train_sgns(&sentences, &sgns_config(cfg, cfg.sub_com_dim, seed))?;
    stage.write_text(paths::TOKENS, &tokens.to_text())?;
    let mut fields = BTreeMap::new();

    let sub_com_texts: Vec<String> = records.iter().map(FailureRecord::sub_com_text).collect();
    let sub_com = aggregate_texts(&ids, &sub_com_texts, &tokens, cfg, Field::SubCom.tag())?;
    stage.write_text(&paths::field(Field::SubCom.tag()), &sub_com.to_text())?;
    fields.insert(
        Field::SubCom.tag().to_string(),
        FieldSummary {
            dim: sub_com.dim(),
            rows: sub_com.len(),
            backend: "sgns".into(),
            zero_rows: zero_rows(&sub_com),
        },
    );

    for field in [Field::Mode, Field::Reason, Field::Effect, Field::Decision] {
        let tag = field.tag();
        let (table, backend) = match cfg.external.get(tag) {
            Some(p) => {
                let path = stage.input(&loaded.resolve(p))?;
                let t = read_embeddings(&path)?;
                (
                    restrict(&t, &ids, tag, &path.display().to_string())?,
                    format!("file:{}", loaded.display(&path)),
                )
            }
            None => {
                let dim = match field {
                    Field::Mode | Field::Reason => cfg.phrase_dim,
                    _ => cfg.sentence_dim,
                };
                let hasher = HashEmbedder::new(dim, seed);
                let mut t = EmbeddingTable::new(dim, tag)?;
                for (id, r) in ids.iter().zip(&records) {
                    t.insert(id.clone(), embed_text(field_text(r, field), &hasher))?;
                }
                (t, "hash".to_string())
            }
        };
        stage.write_text(&paths::field(tag), &table.to_text())?;
        fields.insert(
            tag.to_string(),
            FieldSummary {
                dim: table.dim(),
                rows: table.len(),
                backend,
                zero_rows: zero_rows(&table),
            },
        );
    }

    let verbs = verb_table(&mut stage, loaded, seed)?;
    stage.write_text(paths::VERBS, &verbs.to_text())?;

    let report = EmbedReport {
        vocabulary: tokens.len(),
        fields,
    };
    for (name, f) in &report.fields {
        println!("embed: {name} {} rows x {} ({})", f.rows, f.dim, f.backend);
    }
    stage.write_json(paths::EMBED_REPORT, &report)?;

    if sweep {
        let mut points = Vec::new();
        for &dim in &cfg.sweep_dims {
            let t = train_sgns(&sentences, &sgns_config(cfg, dim, seed))?;
            let agg = aggregate_texts(&ids, &sub_com_texts, &t, cfg, Field::SubCom.tag())?;
            let vectors: Vec<Vec<f64>> = agg.iter().map(|(_, v)| v.to_vec()).collect();
            let similarity_std = similarity_std(&vectors);
            println!("embed: sweep dim {dim} similarity std {similarity_std:.6}");
            points.push(SweepPoint {
                dim,
                similarity_std,
            });
        }
        stage.write_json(paths::SWEEP, SweepReport { points })?;
    }
    stage.finish()?;
    Ok(())
}

/// The verb lexicon, one verb per line, or the built-in list.
pub fn lexicon(stage: &mut Stage<'_>, loaded: &Loaded) -> Result<Vec<String>, Failure> {
    match &loaded.config.fusion.verbs {
        Some(p) => {
            let path = stage.input(&loaded.resolve(p))?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
            let verbs: Vec<String> = text
                .lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect();
            if verbs.is_empty() {
                return Err(Failure::data(format!("{} lists no verbs", path.display())));
            }
            Ok(verbs)
        }
        None => Ok(DEFAULT_VERBS.iter().map(|v| v.to_string()).collect()),
    }
}

/// Vectors of the lexicon verbs in the sentence-field space: an external
/// table when configured, otherwise the hash backend.
fn verb_table(
    stage: &mut Stage<'_>,
    loaded: &Loaded,
    seed: u64,
) -> Result<EmbeddingTable, Failure> {
    let verbs = lexicon(stage, loaded)?;
    let cfg = &loaded.config.embed;
    if let Some(p) = cfg.external.get("verb") {
        let path = stage.input(&loaded.resolve(p))?;
        let t = read_embeddings(&path)?;
        return restrict(&t, &verbs, "verb", &path.display().to_string());
    }
    let hasher = HashEmbedder::new(cfg.sentence_dim, seed);
    let mut t = EmbeddingTable::new(cfg.sentence_dim, "verb")?;
    for v in &verbs {
        t.insert(v.clone(), embed_text(v, &hasher))?;
    }
    Ok(t)
}
