use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::edges::{parse_edges, Edge};
use super::id::label_names;
use super::records::FailureRecord;
use super::split::{stratified_split, Split, SplitSpec};
use crate::error::{Error, Result};
use crate::fusion::FusedFeatureMatrix;

pub const SPLIT_METHOD: &str =
    "per-class stratified split (non-synthetic stand-in for SMOTE balancing)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub label: usize,
    pub split: Split,
    pub features: Vec<f64>,
}

/// Labeled feature nodes, weighted edges and the split they were drawn with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDataset {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub label_names: Vec<String>,
    pub split: SplitSpec,
    pub seed: u64,
}

impl GraphDataset {
    pub fn d_total(&self) -> usize {
        self.nodes.first().map_or(0, |n| n.features.len())
    }

    pub fn classes_present(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.label)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Node counts per (label, split).
    pub fn split_table(&self) -> BTreeMap<usize, [usize; 3]> {
        let mut t: BTreeMap<usize, [usize; 3]> = BTreeMap::new();
        for n in &self.nodes {
            let idx = Split::ALL.iter().position(|s| *s == n.split).unwrap_or(0);
            t.entry(n.label).or_default()[idx] += 1;
        }
        t
    }
}

/// Joins records with their fused rows by id, checks every edge endpoint and
/// draws a stratified split.
pub fn assemble(
    records: &[FailureRecord],
    fused: &FusedFeatureMatrix,
    edges: &[Edge],
    split: SplitSpec,
    seed: u64,
) -> Result<GraphDataset> {
    let rows: BTreeMap<&str, &Vec<f64>> = fused
        .ids
        .iter()
        .map(String::as_str)
        .zip(&fused.rows)
        .collect();
    let ids: Vec<String> = records.iter().map(|r| r.id.to_string()).collect();
    let missing: Vec<&str> = ids
        .iter()
        .map(String::as_str)
        .filter(|id| !rows.contains_key(id))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Assembly(format!(
            "no fused feature row for records {}",
            list(&missing)
        )));
    }
    let known: BTreeSet<&str> = ids.iter().map(String::as_str).collect();
    let dangling: BTreeSet<&str> = edges
        .iter()
        .flat_map(|e| [e.src.as_str(), e.dst.as_str()])
        .filter(|id| !known.contains(id))
        .collect();
    if !dangling.is_empty() {
        let d: Vec<&str> = dangling.into_iter().collect();
        return Err(Error::Assembly(format!(
            "edges reference unknown nodes {}",
            list(&d)
        )));
    }
    let labels: Vec<usize> = records.iter().map(|r| r.label).collect();
    let splits = stratified_split(&ids, &labels, &split, seed)?;
    let nodes = ids
        .into_iter()
        .zip(records)
        .zip(splits)
        .map(|((id, r), s)| Node {
            features: rows[id.as_str()].clone(),
            id,
            label: r.label,
            split: s,
        })
        .collect();
    Ok(GraphDataset {
        nodes,
        edges: edges.to_vec(),
        label_names: label_names(),
        split,
        seed,
    })
}

fn list(items: &[&str]) -> String {
    const SHOWN: usize = 20;
    let head = items
        .iter()
        .take(SHOWN)
        .copied()
        .collect::<Vec<_>>()
        .join(", ");
    if items.len() > SHOWN {
        format!("{head} and {} more", items.len() - SHOWN)
    } else {
        head
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub nodes: usize,
    pub edges: usize,
    pub classes: usize,
    pub classes_present: usize,
    pub d_total: usize,
    pub label_names: Vec<String>,
    pub split: SplitSpec,
    pub split_method: String,
    pub split_counts: BTreeMap<String, usize>,
    pub seed: u64,
    pub config: serde_json::Value,
}

pub fn meta(dataset: &GraphDataset, config: serde_json::Value) -> GraphMeta {
    let mut split_counts = BTreeMap::new();
    for s in Split::ALL {
        split_counts.insert(
            s.name().to_string(),
            dataset.nodes.iter().filter(|n| n.split == s).count(),
        );
    }
    GraphMeta {
        nodes: dataset.nodes.len(),
        edges: dataset.edges.len(),
        classes: dataset.label_names.len(),
        classes_present: dataset.classes_present(),
        d_total: dataset.d_total(),
        label_names: dataset.label_names.clone(),
        split: dataset.split,
        split_method: SPLIT_METHOD.into(),
        split_counts,
        seed: dataset.seed,
        config,
    }
}

fn nodes_csv(dataset: &GraphDataset) -> String {
    let mut out = String::from("id,label,split");
    for c in 0..dataset.d_total() {
        let _ = write!(out, ",f{c}");
    }
    out.push('\n');
    for n in &dataset.nodes {
        let _ = write!(out, "{},{},{}", n.id, n.label, n.split);
        for x in &n.features {
            let _ = write!(out, ",{x:?}");
        }
        out.push('\n');
    }
    out
}

fn edges_csv(edges: &[Edge]) -> String {
    let mut out = String::from("src,dst,weight\n");
    for e in edges {
        let _ = writeln!(out, "{},{},{:?}", e.src, e.dst, e.weight);
    }
    out
}

/// Writes `nodes.csv`, `edges.csv` and `meta.json` into `dir`.
pub fn export(
    dataset: &GraphDataset,
    dir: impl AsRef<Path>,
    config: serde_json::Value,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, body: String| {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(p, e))
    };
    write("nodes.csv", nodes_csv(dataset))?;
    write("edges.csv", edges_csv(&dataset.edges))?;
    let mut m = serde_json::to_string_pretty(&meta(dataset, config))?;
    m.push('\n');
    write("meta.json", m)
}

/// Reads a directory written by [`export`].
pub fn load_export(dir: impl AsRef<Path>) -> Result<(GraphDataset, GraphMeta)> {
    let dir = dir.as_ref();
    let read = |name: &str| {
        let p = dir.join(name);
        std::fs::read_to_string(&p).map_err(|e| Error::io(p, e))
    };
    let meta: GraphMeta = serde_json::from_str(&read("meta.json")?)?;
    let nodes_path = dir.join("nodes.csv").display().to_string();
    let text = read("nodes.csv")?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(&nodes_path, Some(1), "empty file"))?;
    let width = header.split(',').count();
    if width < 3 || !header.starts_with("id,label,split") {
        return Err(Error::parse(
            &nodes_path,
            Some(1),
            "header must start with id,label,split",
        ));
    }
    let mut nodes = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let err = |m: String| Error::Format {
            source_name: nodes_path.clone(),
            row,
            message: m,
        };
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != width {
            return Err(err(format!("{} cells, header has {width}", cells.len())));
        }
        let label = cells[1]
            .parse()
            .map_err(|_| err(format!("bad label {:?}", cells[1])))?;
        let split =
            Split::parse(cells[2]).ok_or_else(|| err(format!("bad split {:?}", cells[2])))?;
        let features = cells[3..]
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| err(format!("bad number {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        nodes.push(Node {
            id: cells[0].to_string(),
            label,
            split,
            features,
        });
    }
    let edges_path = dir.join("edges.csv");
    let edges = parse_edges(
        read("edges.csv")?.as_bytes(),
        &edges_path.display().to_string(),
    )?;
    let dataset = GraphDataset {
        nodes,
        edges,
        label_names: meta.label_names.clone(),
        split: meta.split,
        seed: meta.seed,
    };
    Ok((dataset, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::Field;
    use crate::graphset::parse_id;

    fn record(id: &str) -> FailureRecord {
        let id = parse_id(id).unwrap();
        FailureRecord {
            id,
            system: "s".into(),
            subsystem: "a".into(),
            component: "b".into(),
            failure_mode: "c".into(),
            failure_reason: "d".into(),
            failure_effect: "e".into(),
            emergency_measure: "f".into(),
            label: id.label().unwrap(),
        }
    }

    fn toy() -> (Vec<FailureRecord>, FusedFeatureMatrix, Vec<Edge>) {
        let recs = vec![record("11010101"), record("11010102"), record("21010601")];
        let fused = FusedFeatureMatrix {
            ids: vec!["21010601".into(), "11010101".into(), "11010102".into()],
            rows: vec![vec![0.5, -1.0], vec![0.1, 0.2], vec![1e-300, 3.0]],
            block_widths: vec![(Field::SubCom, 2)],
            standardized: false,
        };
        let edges = vec![Edge {
            src: "11010101".into(),
            dst: "21010601".into(),
            weight: 0.25,
        }];
        (recs, fused, edges)
    }

    #[test]
    fn assemble_and_round_trip() {
        let (recs, fused, edges) = toy();
        let ds = assemble(&recs, &fused, &edges, SplitSpec::default(), 1).unwrap();
        assert_eq!(ds.nodes[0].features, vec![0.1, 0.2]);
        let dir = tempfile::tempdir().unwrap();
        export(&ds, dir.path(), serde_json::json!({})).unwrap();
        let header = std::fs::read_to_string(dir.path().join("nodes.csv")).unwrap();
        assert_eq!(header.lines().next().unwrap().split(',').count(), 3 + 2);
        let (back, meta) = load_export(dir.path()).unwrap();
        assert_eq!(back, ds);
        assert_eq!((meta.nodes, meta.edges, meta.classes), (3, 1, 12));
    }

    #[test]
    fn dangling_edge_is_named() {
        let (recs, fused, mut edges) = toy();
        edges.push(Edge {
            src: "11010101".into(),
            dst: "31010101".into(),
            weight: 1.0,
        });
        let err = assemble(&recs, &fused, &edges, SplitSpec::default(), 1).unwrap_err();
        assert!(
            matches!(err, Error::Assembly(ref m) if m.contains("31010101")),
            "{err}"
        );
    }

    #[test]
    fn missing_feature_row() {
        let (recs, mut fused, edges) = toy();
        fused.ids[0] = "21010701".into();
        assert!(matches!(
            assemble(&recs, &fused, &edges, SplitSpec::default(), 1),
            Err(Error::Assembly(_))
        ));
    }
}
