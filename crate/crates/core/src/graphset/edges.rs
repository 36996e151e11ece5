use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: String,
    pub dst: String,
    pub weight: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    src: String,
    dst: String,
    weight: f64,
}

/// Reads `src,dst,weight` rows. Weights must lie in `(0, 1]`; self-loops and
/// repeated `(src, dst)` pairs are rejected.
pub fn parse_edges(reader: impl std::io::Read, source_name: &str) -> Result<Vec<Edge>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(source_name, Some(1), e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["src", "dst", "weight"] {
        return Err(Error::parse(
            source_name,
            Some(1),
            "header must be src,dst,weight",
        ));
    }
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let err = |m: String| Error::parse(source_name, Some(line), m);
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let raw: RawEdge = rec
            .deserialize(Some(&headers))
            .map_err(|e| err(e.to_string()))?;
        if !(raw.weight > 0.0 && raw.weight <= 1.0) {
            return Err(Error::Validation(format!(
                "{source_name} line {line}: weight {} outside (0, 1]",
                raw.weight
            )));
        }
        if raw.src == raw.dst {
            return Err(Error::Validation(format!(
                "{source_name} line {line}: self-loop on {}",
                raw.src
            )));
        }
        if !seen.insert((raw.src.clone(), raw.dst.clone())) {
            return Err(Error::Validation(format!(
                "{source_name} line {line}: duplicate edge {} -> {}",
                raw.src, raw.dst
            )));
        }
        edges.push(Edge {
            src: raw.src,
            dst: raw.dst,
            weight: raw.weight,
        });
    }
    Ok(edges)
}

pub fn ingest_edges(path: impl AsRef<Path>) -> Result<Vec<Edge>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edges(file, &path.display().to_string())
}

/// Both directions of every edge, each pair carrying the larger of its weights.
pub fn symmetrize(edges: &[Edge]) -> Vec<Edge> {
    let mut best: BTreeMap<(String, String), f64> = BTreeMap::new();
    for e in edges {
        let key = if e.src <= e.dst {
            (e.src.clone(), e.dst.clone())
        } else {
            (e.dst.clone(), e.src.clone())
        };
        let w = best.entry(key).or_insert(e.weight);
        *w = w.max(e.weight);
    }
    best.into_iter()
        .flat_map(|((a, b), w)| {
            [
                Edge {
                    src: a.clone(),
                    dst: b.clone(),
                    weight: w,
                },
                Edge {
                    src: b,
                    dst: a,
                    weight: w,
                },
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows() {
        let e = parse_edges(
            "src,dst,weight\n11010101,11010102,0.5\n11010102,21010601,1\n".as_bytes(),
            "mem",
        )
        .unwrap();
        assert_eq!(e.len(), 2);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            parse_edges("src,dst,weight\na,b,0\n".as_bytes(), "m"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_edges("src,dst,weight\na,a,0.2\n".as_bytes(), "m"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_edges("src,dst,weight\na,b,0.2\na,b,0.3\n".as_bytes(), "m"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_edges("src,dst,weight\na,b,x\n".as_bytes(), "m"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn symmetrize_takes_max() {
        let e = vec![
            Edge {
                src: "a".into(),
                dst: "b".into(),
                weight: 0.2,
            },
            Edge {
                src: "b".into(),
                dst: "a".into(),
                weight: 0.7,
            },
            Edge {
                src: "b".into(),
                dst: "c".into(),
                weight: 0.1,
            },
        ];
        let s = symmetrize(&e);
        assert_eq!(s.len(), 4);
        assert!(s
            .iter()
            .filter(|e| e.src == "a" || e.dst == "a")
            .all(|e| e.weight == 0.7));
    }
}
