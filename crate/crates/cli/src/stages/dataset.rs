use std::collections::BTreeMap;
use std::fmt::Write as _;

use fgf_core::embeddings::read_embeddings;
use fgf_core::fusion::{Field, FusedFeatureMatrix};
use fgf_core::graphset::{
    assemble, export, ingest_edges, load_export, symmetrize, SplitSpec, SPLIT_METHOD,
};
use fgf_core::validate::{cosine_block_stats, kmeans, silhouette, FieldPair, SimilarityReport};
use serde::{Deserialize, Serialize};

use super::embed::aggregate_texts;
use super::fuse::{FuseReport, LayoutNote};
use super::{paths, records};
use crate::artifacts::{Stage, Stamped};
use crate::config::Loaded;
use crate::failure::Failure;

pub const REFERENCE_NODES: usize = 1262;
pub const REFERENCE_EDGES: usize = 6150;
pub const REFERENCE_CLASSES: usize = 12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildReport {
    pub nodes: usize,
    pub edges: usize,
    pub classes: usize,
    pub classes_present: usize,
    pub d_total: usize,
    pub undirected: bool,
    pub split: SplitSpec,
    pub split_method: String,
    /// Node counts per class name as (train, val, test).
    pub split_table: BTreeMap<String, [usize; 3]>,
    pub layout: LayoutNote,
    pub reference: ShapeReference,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeReference {
    pub nodes: usize,
    pub edges: usize,
    pub classes: usize,
}

impl Default for ShapeReference {
    fn default() -> Self {
        Self {
            nodes: REFERENCE_NODES,
            edges: REFERENCE_EDGES,
            classes: REFERENCE_CLASSES,
        }
    }
}

pub fn build_graph(loaded: &Loaded) -> Result<(), Failure> {
    let mut stage = Stage::new("build-graph", loaded);
    loaded.seed("build-graph")?;
    let seed = stage.stage_seed().expect("seed checked");
    let cfg = &loaded.config.graph;
    let records = records(&mut stage)?;
    let table = read_embeddings(stage.require(paths::FUSED, "fuse")?)?;
    let fuse_report: Stamped<FuseReport> = stage.read_json(paths::FUSE_REPORT, "fuse")?;
    let fused = FusedFeatureMatrix {
        ids: table.iter().map(|(k, _)| k.to_string()).collect(),
        rows: table.iter().map(|(_, v)| v.to_vec()).collect(),
        block_widths: Vec::new(),
        standardized: fuse_report.body.standardized,
    };
    let mut edges = match &cfg.edges {
        Some(p) => ingest_edges(stage.input(&loaded.resolve(p))?)?,
        None => Vec::new(),
    };
    if cfg.undirected {
        edges = symmetrize(&edges);
    }
    let dataset = assemble(&records, &fused, &edges, cfg.split, seed)?;
    let dir = stage.out(paths::GRAPH_DIR);
    let stamp = serde_json::json!({ "config_hash": loaded.hash, "seed": loaded.config.seed });
    export(&dataset, &dir, stamp)?;
    for name in ["nodes.csv", "edges.csv", "meta.json"] {
        stage.wrote(&dir.join(name))?;
    }
    let split_table = dataset
        .split_table()
        .into_iter()
        .map(|(l, c)| (dataset.label_names[l].clone(), c))
        .collect();
    let report = BuildReport {
        nodes: dataset.nodes.len(),
        edges: dataset.edges.len(),
        classes: dataset.label_names.len(),
        classes_present: dataset.classes_present(),
        d_total: dataset.d_total(),
        undirected: cfg.undirected,
        split: cfg.split,
        split_method: SPLIT_METHOD.to_string(),
        split_table,
        layout: fuse_report.body.layout,
        reference: ShapeReference::default(),
    };
    println!(
        "build-graph: {} nodes, {} edges, {} of {} classes present, d_total = {}",
        report.nodes, report.edges, report.classes_present, report.classes, report.d_total
    );
    println!("build-graph: note: {}", report.layout.note);
    stage.write_json(paths::BUILD_REPORT, &report)?;
    stage.finish()?;
    Ok(())
}

pub const REFERENCE_SILHOUETTE: f64 = 0.641;
pub const REFERENCE_PAIR_MEANS: [(&str, f64); 3] = [
    ("subsystem-component", 0.72),
    ("mode-reason", 0.65),
    ("effect-measure", 0.68),
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub k: usize,
    pub inertia: f64,
    pub iterations: usize,
    pub converged: bool,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidateReport {
    pub nodes: usize,
    pub similarity: SimilarityReport,
    /// Silhouette of the fused features under the system labels.
    pub silhouette_labels: f64,
    pub silhouette_per_label: BTreeMap<String, f64>,
    /// Silhouette of the fused features under the k-means assignment.
    pub silhouette_clusters: f64,
    pub clusters: ClusterSummary,
    pub reference_silhouette: f64,
    pub reference_pair_means: BTreeMap<String, f64>,
}

fn centroids(features: &[Vec<f64>], labels: &[usize], n: usize) -> Vec<Option<Vec<f64>>> {
    let d = features.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; d]; n];
    let mut counts = vec![0usize; n];
    for (x, &l) in features.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(x) {
            *s += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| (c > 0).then(|| s.iter().map(|v| v / c as f64).collect()))
        .collect()
}

pub fn validate(loaded: &Loaded) -> Result<(), Failure> {
    let mut stage = Stage::new("validate", loaded);
    loaded.seed("validate")?;
    let seed = stage.stage_seed().expect("seed checked");
    let cfg = &loaded.config.validate;
    let records = records(&mut stage)?;
    let dir = stage.out(paths::GRAPH_DIR);
    for name in ["nodes.csv", "edges.csv", "meta.json"] {
        stage.require(&format!("{}/{name}", paths::GRAPH_DIR), "build-graph")?;
    }
    let (dataset, _) = load_export(&dir)?;
    let features: Vec<Vec<f64>> = dataset.nodes.iter().map(|n| n.features.clone()).collect();
    let labels: Vec<usize> = dataset.nodes.iter().map(|n| n.label).collect();

    let ids: Vec<String> = records.iter().map(|r| r.id.to_string()).collect();
    let tokens = read_embeddings(stage.require(paths::TOKENS, "embed")?)?;
    let ecfg = &loaded.config.embed;
    let subsystems: Vec<String> = records.iter().map(|r| r.subsystem.clone()).collect();
    let components: Vec<String> = records.iter().map(|r| r.component.clone()).collect();
    let sub = aggregate_texts(&ids, &subsystems, &tokens, ecfg, "subsystem")?;
    let com = aggregate_texts(&ids, &components, &tokens, ecfg, "component")?;
    let mut field_rows = BTreeMap::new();
    for f in [Field::Mode, Field::Reason, Field::Effect, Field::Decision] {
        let t = read_embeddings(stage.require(&paths::field(f.tag()), "embed")?)?;
        let rows: Vec<Vec<f64>> = ids
            .iter()
            .map(|id| {
                t.get(id).map(<[f64]>::to_vec).ok_or_else(|| {
                    Failure::data(format!("the {} table has no row for record {id}", f.tag()))
                })
            })
            .collect::<Result<_, _>>()?;
        field_rows.insert(f.tag(), rows);
    }
    let sub_rows: Vec<Vec<f64>> = ids
        .iter()
        .map(|id| sub.get(id).expect("aggregated").to_vec())
        .collect();
    let com_rows: Vec<Vec<f64>> = ids
        .iter()
        .map(|id| com.get(id).expect("aggregated").to_vec())
        .collect();
    let similarity = cosine_block_stats(&[
        FieldPair {
            name: "subsystem-component",
            a: &sub_rows,
            b: &com_rows,
        },
        FieldPair {
            name: "mode-reason",
            a: &field_rows[Field::Mode.tag()],
            b: &field_rows[Field::Reason.tag()],
        },
        FieldPair {
            name: "effect-measure",
            a: &field_rows[Field::Effect.tag()],
            b: &field_rows[Field::Decision.tag()],
        },
    ])?;

    let by_labels = silhouette(&features, &labels)?;
    let k = cfg.clusters.min(features.len());
    let km = kmeans(&features, k, seed, cfg.max_iter)?;
    let by_clusters = silhouette(&features, &km.assignments)?;
    let mut sizes = vec![0usize; k];
    for &a in &km.assignments {
        sizes[a] += 1;
    }
    let report = ValidateReport {
        nodes: features.len(),
        similarity,
        silhouette_labels: by_labels.score,
        silhouette_per_label: by_labels
            .per_label
            .iter()
            .map(|(l, s)| (dataset.label_names[*l].clone(), *s))
            .collect(),
        silhouette_clusters: by_clusters.score,
        clusters: ClusterSummary {
            k,
            inertia: km.inertia(),
            iterations: km.inertia_history.len(),
            converged: km.converged,
            sizes,
        },
        reference_silhouette: REFERENCE_SILHOUETTE,
        reference_pair_means: REFERENCE_PAIR_MEANS
            .iter()
            .map(|(n, v)| (n.to_string(), *v))
            .collect(),
    };
    for p in &report.similarity.pairs {
        println!(
            "validate: {} paired cosine {:.3}, cross-record {:.3}",
            p.name, p.paired_mean, p.cross_mean
        );
    }
    println!(
        "validate: silhouette {:.3} by system label, {:.3} by k-means (k = {k})",
        report.silhouette_labels, report.silhouette_clusters
    );
    stage.write_json(paths::VALIDATE_REPORT, &report)?;

    if cfg.distance_csv {
        let n = dataset.label_names.len();
        let cents = centroids(&features, &labels, n);
        let mut csv = String::from("label_a,label_b,distance\n");
        for a in 0..n {
            for b in (a + 1)..n {
                if let (Some(x), Some(y)) = (&cents[a], &cents[b]) {
                    let d = x
                        .iter()
                        .zip(y)
                        .map(|(p, q)| (p - q) * (p - q))
                        .sum::<f64>()
                        .sqrt();
                    let _ = writeln!(csv, "{a},{b},{d:?}");
                }
            }
        }
        stage.write_text(paths::DISTANCES, &csv)?;
    }
    stage.finish()?;
    Ok(())
}
