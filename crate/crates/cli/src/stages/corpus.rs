use std::collections::BTreeSet;

use fgf_core::corpus::{
    build_query, cache_dir_from_env, dedup_with_report, load_offline, match_counts, write_offline,
    ArxivClient, DedupReport, Document, HttpTransport,
};
use fgf_core::frontier::{
    common_bounds, evaluate_run, paper_reference, AlgoMetrics, ObjectiveBounds,
};
use fgf_core::keywords::update_weights;
use fgf_core::optimizer::{run, Algorithm, RunHistory};
use serde::{Deserialize, Serialize};

use super::{paths, taxonomy};
use crate::artifacts::{Stage, Stamped};
use crate::config::{CorpusSource, Loaded};
use crate::failure::Failure;

#[derive(Debug, Serialize, Deserialize)]
pub struct FetchReport {
    pub source: CorpusSource,
    pub pool: Vec<String>,
    pub dedup: DedupReport,
    pub labeled: usize,
    pub relevant: usize,
    /// Frequency-driven keyword weights over the kept documents.
    pub keyword_weights: Vec<(String, f64)>,
}

fn apply_labels(docs: &mut [Document], text: &str) {
    let relevant: BTreeSet<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    for d in docs {
        d.relevant = Some(relevant.contains(d.id.as_str()));
    }
}

pub fn fetch(loaded: &Loaded) -> Result<(), Failure> {
    let mut stage = Stage::new("fetch", loaded);
    let cfg = &loaded.config.corpus;
    let tax = taxonomy(&mut stage)?;
    let mut docs = match cfg.source {
        CorpusSource::Offline => {
            let p = cfg
                .path
                .as_ref()
                .ok_or_else(|| Failure::config("offline corpus source needs corpus.path"))?;
            load_offline(stage.input(&loaded.resolve(p))?)?
        }
        CorpusSource::Live => {
            let cache = cache_dir_from_env(loaded.resolve(&cfg.cache_dir));
            let client = ArxivClient::new(HttpTransport::default(), cache);
            client.fetch(&build_query(tax.pool()), cfg.max_results)?
        }
    };
    if let Some(p) = &cfg.labels {
        let path = stage.input(&loaded.resolve(p))?;
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        apply_labels(&mut docs, &text);
    }
    let (kept, dedup) = dedup_with_report(&docs);
    if kept.is_empty() {
        return Err(Failure::data("the corpus holds no documents"));
    }
    let out = stage.out(paths::CORPUS);
    if let Some(dir) = out.parent() {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::runtime(format!("{}: {e}", dir.display())))?;
    }
    write_offline(&kept, &out)?;
    stage.wrote(&out)?;

    let profile = match_counts(&kept, tax.pool())?;
    let freq: Vec<(String, f64)> = tax.pool().iter().cloned().zip(profile.totals()).collect();
    let weights = update_weights(&freq);
    let report = FetchReport {
        source: cfg.source,
        pool: tax.pool().to_vec(),
        dedup,
        labeled: kept.iter().filter(|d| d.relevant.is_some()).count(),
        relevant: kept.iter().filter(|d| d.relevant == Some(true)).count(),
        keyword_weights: weights
            .tokens()
            .iter()
            .cloned()
            .zip(weights.values().iter().copied())
            .collect(),
    };
    stage.write_json(paths::FETCH_REPORT, &report)?;
    println!(
        "fetch: kept {} of {} documents ({} duplicates)",
        dedup.kept, dedup.input, dedup.removed
    );
    stage.finish()?;
    Ok(())
}

fn read_corpus(stage: &mut Stage<'_>) -> Result<Vec<Document>, Failure> {
    let path = stage.require(paths::CORPUS, "fetch")?;
    Ok(load_offline(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunArtifact {
    pub history: RunHistory,
}

pub fn optimize(loaded: &Loaded, algos: Option<&[Algorithm]>) -> Result<(), Failure> {
    let mut stage = Stage::new("optimize", loaded);
    loaded.seed("optimize")?;
    let seed = stage.stage_seed().expect("seed checked");
    let docs = read_corpus(&mut stage)?;
    let tax = taxonomy(&mut stage)?;
    let profile = match_counts(&docs, tax.pool())?;
    let algos = algos.unwrap_or(&loaded.config.optimizer.algos);
    for &algo in algos {
        let cfg = loaded.config.optimizer.run_config(algo, seed);
        let history = run(&cfg, &profile)?;
        println!(
            "optimize: {algo} front of {} after {} evaluations",
            history.front.len(),
            history.evaluations
        );
        stage.write_json(&paths::run(algo.name()), RunArtifact { history })?;
    }
    stage.finish()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PaperReference {
    pub hypervolume: f64,
    #[serde(rename = "R")]
    pub recall: f64,
    #[serde(rename = "P")]
    pub precision: f64,
    #[serde(rename = "F1")]
    pub f1: f64,
}

impl PaperReference {
    pub fn of(algo: Algorithm) -> Self {
        let (hypervolume, recall, precision, f1) = paper_reference(algo);
        Self {
            hypervolume,
            recall,
            precision,
            f1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgoEntry {
    pub measured: AlgoMetrics,
    pub paper: PaperReference,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub bounds: ObjectiveBounds,
    pub algos: Vec<AlgoEntry>,
}

pub fn evaluate(loaded: &Loaded) -> Result<(), Failure> {
    let mut stage = Stage::new("evaluate", loaded);
    let docs = read_corpus(&mut stage)?;
    let tax = taxonomy(&mut stage)?;
    let profile = match_counts(&docs, tax.pool())?;
    let mut runs = Vec::new();
    for algo in Algorithm::ALL {
        let rel = paths::run(algo.name());
        if stage.out(&rel).exists() {
            let a: Stamped<RunArtifact> = stage.read_json(&rel, "optimize")?;
            runs.push(a.body.history);
        }
    }
    if runs.is_empty() {
        stage.require(&paths::run("<algo>"), "optimize")?;
    }
    let bounds = common_bounds(&runs)?;
    let mut algos = Vec::new();
    for r in &runs {
        let measured = evaluate_run(r, &bounds, &profile, &docs)?;
        println!(
            "evaluate: {} hypervolume {:.4} (exact {:.4}), F1 {}",
            r.algo,
            measured.hypervolume_paper,
            measured.hypervolume_exact,
            measured.f1.map_or("n/a".to_string(), |f| format!("{f:.4}"))
        );
        algos.push(AlgoEntry {
            measured,
            paper: PaperReference::of(r.algo),
        });
    }
    stage.write_json(paths::METRICS, MetricsReport { bounds, algos })?;
    stage.finish()?;
    Ok(())
}
