use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::corpus::{FetchReport, MetricsReport};
use super::dataset::{BuildReport, ValidateReport};
use super::embed::SweepReport;
use super::fuse::FuseReport;
use super::paths;
use crate::artifacts::{manifest_path, Manifest, Stage, Stamped};
use crate::config::Loaded;
use crate::failure::Failure;

pub const STAGES: [&str; 7] = [
    "fetch",
    "optimize",
    "evaluate",
    "embed",
    "fuse",
    "build-graph",
    "validate",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Row {
    pub section: String,
    pub quantity: String,
    pub measured: Value,
    pub reference: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageEntry {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub current: bool,
    pub outputs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub stages: BTreeMap<String, StageEntry>,
    pub missing_stages: Vec<String>,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

fn row(section: &str, quantity: &str, measured: Value, reference: Value) -> Row {
    Row {
        section: section.into(),
        quantity: quantity.into(),
        measured,
        reference,
    }
}

fn optional<T: DeserializeOwned>(
    stage: &mut Stage<'_>,
    rel: &str,
    producer: &str,
) -> Result<Option<T>, Failure> {
    if !stage.out(rel).exists() {
        return Ok(None);
    }
    let s: Stamped<T> = stage.read_json(rel, producer)?;
    Ok(Some(s.body))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => format!("{f:.4}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn render_markdown(summary: &Summary) -> String {
    let mut md = String::from("# Pipeline summary\n\n## Stages\n\n| stage | config hash | seed | current |\n|---|---|---|---|\n");
    for (name, s) in &summary.stages {
        let seed = s.seed.map_or("-".to_string(), |x| x.to_string());
        let _ = writeln!(
            md,
            "| {name} | {} | {seed} | {} |",
            s.config_hash,
            if s.current { "yes" } else { "no" }
        );
    }
    if !summary.missing_stages.is_empty() {
        let _ = writeln!(md, "\nNot run: {}", summary.missing_stages.join(", "));
    }
    md.push_str(
        "\n## Results\n\n| section | quantity | measured | reference |\n|---|---|---|---|\n",
    );
    for r in &summary.rows {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} |",
            r.section,
            r.quantity,
            cell(&r.measured),
            cell(&r.reference)
        );
    }
    if !summary.notes.is_empty() {
        md.push_str("\n## Notes\n\n");
        for n in &summary.notes {
            let _ = writeln!(md, "- {n}");
        }
    }
    md
}

pub fn report(loaded: &Loaded) -> Result<(), Failure> {
    let mut stage = Stage::new("report", loaded);
    let mut stages = BTreeMap::new();
    let mut missing_stages = Vec::new();
    let mut notes = Vec::new();
    for name in STAGES {
        let path = manifest_path(&loaded.out, name);
        if !path.exists() {
            missing_stages.push(name.to_string());
            continue;
        }
        let m: Manifest = stage.read_json(&format!("manifests/{name}.json"), name)?;
        let current = m.config_hash == loaded.hash;
        if !current {
            notes.push(format!(
                "`{name}` ran under a different configuration (hash {})",
                m.config_hash
            ));
        }
        stages.insert(
            name.to_string(),
            StageEntry {
                config_hash: m.config_hash,
                seed: m.seed,
                current,
                outputs: m.outputs.len(),
            },
        );
    }
    if stages.is_empty() {
        stage.require("manifests/fetch.json", "fetch")?;
    }

    let mut rows = Vec::new();
    if let Some(f) = optional::<FetchReport>(&mut stage, paths::FETCH_REPORT, "fetch")? {
        rows.push(row(
            "corpus",
            "documents kept",
            json!(f.dedup.kept),
            Value::Null,
        ));
        rows.push(row(
            "corpus",
            "duplication rate",
            json!(f.dedup.duplication_rate),
            json!("< 0.008"),
        ));
        rows.push(row(
            "corpus",
            "keyword pool size",
            json!(f.pool.len()),
            Value::Null,
        ));
        rows.push(row(
            "corpus",
            "relevant documents",
            json!(f.relevant),
            Value::Null,
        ));
    }
    if let Some(m) = optional::<MetricsReport>(&mut stage, paths::METRICS, "evaluate")? {
        for a in &m.algos {
            let name = a.measured.algo.name();
            rows.push(row(
                "search",
                &format!("{name} hypervolume"),
                json!(a.measured.hypervolume_paper),
                json!(a.paper.hypervolume),
            ));
            rows.push(row(
                "search",
                &format!("{name} hypervolume (exact)"),
                json!(a.measured.hypervolume_exact),
                Value::Null,
            ));
            rows.push(row(
                "search",
                &format!("{name} R"),
                json!(a.measured.recall),
                json!(a.paper.recall),
            ));
            rows.push(row(
                "search",
                &format!("{name} P"),
                json!(a.measured.precision),
                json!(a.paper.precision),
            ));
            rows.push(row(
                "search",
                &format!("{name} F1"),
                json!(a.measured.f1),
                json!(a.paper.f1),
            ));
        }
        notes.push(
            "reference hypervolumes are 0.153 (hncsa), 0.147 (csa) and 0.145 (nsga2); they come from live queries \
             and are not expected to match a synthetic corpus"
                .into(),
        );
    }
    if let Some(s) = optional::<SweepReport>(&mut stage, paths::SWEEP, "embed --sweep")? {
        for p in &s.points {
            rows.push(row(
                "embedding",
                &format!("similarity std at dim {}", p.dim),
                json!(p.similarity_std),
                Value::Null,
            ));
        }
    }
    if let Some(f) = optional::<FuseReport>(&mut stage, paths::FUSE_REPORT, "fuse")? {
        rows.push(row("fusion", "k", json!(f.k), json!(121)));
        rows.push(row(
            "fusion",
            "explained variance",
            json!(f.variance_ratio),
            json!(f.target_variance),
        ));
        rows.push(row(
            "fusion",
            "d_total",
            json!(f.layout.d_total),
            json!(f.layout.formula_at_reference_k),
        ));
        rows.push(row("fusion", "omega1", json!(f.omega1), json!(0.73106)));
        notes.push(f.layout.note.clone());
    }
    if let Some(b) = optional::<BuildReport>(&mut stage, paths::BUILD_REPORT, "build-graph")? {
        rows.push(row(
            "graph",
            "nodes",
            json!(b.nodes),
            json!(b.reference.nodes),
        ));
        rows.push(row(
            "graph",
            "edges",
            json!(b.edges),
            json!(b.reference.edges),
        ));
        rows.push(row(
            "graph",
            "classes",
            json!(b.classes_present),
            json!(b.reference.classes),
        ));
        rows.push(row(
            "graph",
            "d_total",
            json!(b.d_total),
            json!(format!(
                "{} by formula, {} in table",
                b.layout.formula_at_reference_k, b.layout.reference_table_d_total
            )),
        ));
    }
    if let Some(v) = optional::<ValidateReport>(&mut stage, paths::VALIDATE_REPORT, "validate")? {
        for p in &v.similarity.pairs {
            rows.push(row(
                "validation",
                &format!("{} mean cosine", p.name),
                json!(p.paired_mean),
                v.reference_pair_means
                    .get(&p.name)
                    .map_or(Value::Null, |x| json!(x)),
            ));
        }
        rows.push(row(
            "validation",
            "silhouette (system labels)",
            json!(v.silhouette_labels),
            json!(v.reference_silhouette),
        ));
        rows.push(row(
            "validation",
            "silhouette (k-means)",
            json!(v.silhouette_clusters),
            json!(v.reference_silhouette),
        ));
    }

    let summary = Summary {
        stages,
        missing_stages,
        rows,
        notes,
    };
    let md = render_markdown(&summary);
    stage.write_json(paths::SUMMARY_JSON, &summary)?;
    stage.write_text(paths::SUMMARY_MD, &md)?;
    print!("{md}");
    stage.finish()?;
    Ok(())
}
