mod common;

use std::collections::BTreeMap;

use common::fixture;
use fgf_core::fusion::{Field, FusedFeatureMatrix};
use fgf_core::graphset::{
    assemble, export, ingest_edges, ingest_records, load_export, parse_id, split_counts,
    stratified_split, symmetrize, Edge, FailureModeId, IngestMode, Split, SplitSpec, SYSTEMS,
};
use fgf_core::Error;
use proptest::prelude::*;

#[test]
fn first_reference_row_decodes() {
    let id = parse_id("11010101").unwrap();
    assert_eq!(
        id,
        FailureModeId {
            category: 1,
            system: 1,
            subsystem: 1,
            component: 1,
            mode: 1
        }
    );
    assert_eq!(id.label(), Some(0));
    assert_eq!(SYSTEMS[0].2, "Target and Obstacle Perception System");
    let second = parse_id("11010102").unwrap();
    assert_eq!(second.mode, 2);
    assert_eq!(second.label(), Some(0));
    assert_eq!(parse_id("33991299").unwrap().label(), Some(11));
    assert_eq!(parse_id("19000000").unwrap().label(), None);
}

#[test]
fn malformed_ids_are_rejected() {
    for bad in [
        "1101010",
        "110101011",
        "4101010a",
        "41010101",
        "01010101",
        "",
    ] {
        assert!(parse_id(bad).is_err(), "{bad}");
    }
}

#[test]
fn record_fixture_ingests_every_row() {
    let path = fixture("records.csv");
    let report = ingest_records(&path, None, IngestMode::Strict).unwrap();
    let rows = csv::Reader::from_path(&path).unwrap().records().count();
    assert_eq!(report.records.len(), rows);
    assert!(report.skipped.is_empty());
    for r in &report.records {
        assert_eq!(Some(r.label), r.id.label());
        assert_eq!(SYSTEMS[r.label].2, r.system);
    }
    let first = &report.records[0];
    assert_eq!(first.subsystem, "Sonar System");
    assert_eq!(first.sub_com_text(), "Sonar System Array Transducer");
}

#[test]
fn edge_fixture_references_known_records() {
    let records = ingest_records(fixture("records.csv"), None, IngestMode::Strict)
        .unwrap()
        .records;
    let ids: std::collections::BTreeSet<String> =
        records.iter().map(|r| r.id.to_string()).collect();
    let edges = ingest_edges(fixture("edges.csv")).unwrap();
    assert!(!edges.is_empty());
    for e in &edges {
        assert!(ids.contains(&e.src) && ids.contains(&e.dst));
        assert!(e.weight > 0.0 && e.weight <= 1.0);
    }
}

#[test]
fn symmetrized_edges_keep_the_heavier_direction() {
    let e = |s: &str, d: &str, w: f64| Edge {
        src: s.into(),
        dst: d.into(),
        weight: w,
    };
    let out = symmetrize(&[e("a", "b", 0.3), e("b", "a", 0.7), e("c", "a", 0.2)]);
    assert_eq!(out.len(), 4);
    assert!(out.contains(&e("a", "b", 0.7)));
    assert!(out.contains(&e("b", "a", 0.7)));
    assert!(out.contains(&e("a", "c", 0.2)));
}

fn dataset_inputs(n_per_label: &[usize]) -> (Vec<fgf_core::FailureRecord>, FusedFeatureMatrix) {
    let base = ingest_records(fixture("records.csv"), None, IngestMode::Strict)
        .unwrap()
        .records;
    let mut records = Vec::new();
    for (label, &n) in n_per_label.iter().enumerate() {
        let (c, s, _) = SYSTEMS[label];
        for m in 0..n {
            let mut r = base[0].clone();
            r.id = FailureModeId {
                category: c,
                system: s,
                subsystem: 1,
                component: 1,
                mode: m as u8,
            };
            r.label = label;
            records.push(r);
        }
    }
    let ids: Vec<String> = records.iter().map(|r| r.id.to_string()).collect();
    let rows = (0..ids.len())
        .map(|i| vec![i as f64 * 0.5, -(i as f64) / 3.0, 1e-7 * i as f64])
        .collect();
    let fused = FusedFeatureMatrix {
        ids,
        rows,
        block_widths: vec![(Field::SubCom, 3)],
        standardized: false,
    };
    (records, fused)
}

#[test]
fn assembled_split_matches_split_counts() {
    let sizes = [7, 3, 11, 1, 5];
    let (records, fused) = dataset_inputs(&sizes);
    let spec = SplitSpec::default();
    let ds = assemble(&records, &fused, &[], spec, 9).unwrap();
    let want = split_counts(&sizes, &spec).unwrap();
    let table = ds.split_table();
    for (label, row) in want.iter().enumerate() {
        assert_eq!(table[&label], *row, "label {label}");
    }
    assert_eq!(ds.d_total(), 3);
    assert_eq!(ds.classes_present(), 5);
}

#[test]
fn dangling_edge_is_an_assembly_error() {
    let (records, fused) = dataset_inputs(&[2]);
    let edge = Edge {
        src: records[0].id.to_string(),
        dst: "29999999".into(),
        weight: 0.5,
    };
    let err = assemble(&records, &fused, &[edge], SplitSpec::default(), 0).unwrap_err();
    assert!(
        matches!(err, Error::Assembly(ref m) if m.contains("29999999")),
        "{err}"
    );
}

#[test]
fn export_round_trip() {
    let (records, fused) = dataset_inputs(&[4, 4, 2]);
    let edges = vec![Edge {
        src: records[0].id.to_string(),
        dst: records[5].id.to_string(),
        weight: 0.125,
    }];
    let ds = assemble(&records, &fused, &edges, SplitSpec::default(), 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export(&ds, dir.path(), serde_json::json!({"k": 1})).unwrap();
    let (back, meta) = load_export(dir.path()).unwrap();
    assert_eq!(back, ds);
    assert_eq!(meta.nodes, 10);
    assert_eq!(meta.edges, 1);
    assert_eq!(meta.classes, 12);
    assert_eq!(meta.classes_present, 3);
    assert_eq!(meta.split_counts.values().sum::<usize>(), 10);
}

proptest! {
    #[test]
    fn id_round_trip(c in 1u8..=3, s in 0u8..10, sub in 0u8..100, comp in 0u8..100, m in 0u8..100) {
        let id = FailureModeId { category: c, system: s, subsystem: sub, component: comp, mode: m };
        let text = id.to_string();
        prop_assert_eq!(text.len(), 8);
        prop_assert_eq!(parse_id(&text).unwrap(), id);
        let json = serde_json::to_string(&id).unwrap();
        prop_assert_eq!(serde_json::from_str::<FailureModeId>(&json).unwrap(), id);
    }

    #[test]
    fn split_counts_respect_rows_and_rounding(
        sizes in prop::collection::vec(0usize..60, 1..13),
        a in 1u32..8, b in 1u32..8, c in 1u32..8,
    ) {
        let t = (a + b + c) as f64;
        let spec = SplitSpec { train: a as f64 / t, val: b as f64 / t, test: 1.0 - a as f64 / t - b as f64 / t };
        let counts = split_counts(&sizes, &spec).unwrap();
        let f = spec.fractions();
        for (row, &n) in counts.iter().zip(&sizes) {
            prop_assert_eq!(row.iter().sum::<usize>(), n);
            for s in 0..3 {
                let target = n as f64 * f[s];
                prop_assert!((row[s] as f64 - target).abs() < 1.0 + 1e-9, "{row:?} vs {target}");
            }
        }
        let n: usize = sizes.iter().sum();
        for s in 0..3 {
            let col: usize = counts.iter().map(|r| r[s]).sum();
            prop_assert!((col as f64 - n as f64 * f[s]).abs() < 1.0 + 1e-9);
        }
    }

    #[test]
    fn stratified_split_recounts_to_split_counts(
        labels in prop::collection::vec(0usize..5, 1..80),
        seed in 0u64..1000,
    ) {
        let ids: Vec<String> = (0..labels.len()).map(|i| format!("{i:08}")).collect();
        let spec = SplitSpec::default();
        let splits = stratified_split(&ids, &labels, &spec, seed).unwrap();
        let n_classes = labels.iter().max().unwrap() + 1;
        let sizes: Vec<usize> = (0..n_classes).map(|c| labels.iter().filter(|&&l| l == c).count()).collect();
        let want = split_counts(&sizes, &spec).unwrap();
        let mut got: BTreeMap<usize, [usize; 3]> = BTreeMap::new();
        for (l, s) in labels.iter().zip(&splits) {
            got.entry(*l).or_default()[Split::ALL.iter().position(|x| x == s).unwrap()] += 1;
        }
        for (c, row) in want.iter().enumerate() {
            prop_assert_eq!(got.get(&c).copied().unwrap_or_default(), *row);
        }
        prop_assert_eq!(stratified_split(&ids, &labels, &spec, seed).unwrap(), splits);
    }
}
