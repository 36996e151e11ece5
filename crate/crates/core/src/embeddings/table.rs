use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Embedder;
use crate::error::{Error, Result};

/// Vectors of one width keyed by token or record id, tagged with the record
/// field they describe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    dim: usize,
    field: String,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize, field: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("embedding dimension must be positive".into()));
        }
        let field = field.into();
        if field.is_empty() || field.contains(char::is_whitespace) {
            return Err(Error::Config(format!("invalid field tag {field:?}")));
        }
        Ok(Self {
            dim,
            field,
            vectors: BTreeMap::new(),
        })
    }

    pub fn insert(&mut self, key: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let key = key.into();
        if key.is_empty() || key.contains(['\t', '\n', '\r']) {
            return Err(Error::Validation(format!("invalid embedding key {key:?}")));
        }
        if vector.len() != self.dim {
            return Err(Error::Shape(format!(
                "vector for {key:?} has length {}, table dim is {}",
                vector.len(),
                self.dim
            )));
        }
        self.vectors.insert(key, vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> &str {
        &self.field
    }

    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.vectors.get(key).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("#dim={} field={}\n", self.dim, self.field);
        for (key, v) in &self.vectors {
            out.push_str(key);
            out.push('\t');
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                // Debug formatting of f64 is the shortest round-trip form
                let _ = write!(out, "{x:?}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(reader: impl BufRead, source_name: &str) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, Ok(l))) if l.trim().is_empty() => continue,
                Some((_, Ok(l))) => break l,
                Some((_, Err(e))) => return Err(Error::io(source_name, e)),
                None => return Err(Error::parse(source_name, Some(1), "missing header line")),
            }
        };
        let (dim, field) = parse_header(&header).ok_or_else(|| {
            Error::parse(
                source_name,
                Some(1),
                format!("bad header {header:?}, expected `#dim=<D> field=<tag>`"),
            )
        })?;
        let mut table = EmbeddingTable::new(dim, field)?;
        for (idx, line) in lines {
            let row = idx + 1;
            let line = line.map_err(|e| Error::io(source_name, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let fmt_err = |message: String| Error::Format {
                source_name: source_name.to_string(),
                row,
                message,
            };
            let (key, rest) = line
                .split_once('\t')
                .ok_or_else(|| fmt_err("missing tab between key and values".into()))?;
            let values = rest
                .split(' ')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| fmt_err(format!("bad number {s:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != dim {
                return Err(fmt_err(format!(
                    "{} values, header says dim={dim}",
                    values.len()
                )));
            }
            if table.vectors.contains_key(key) {
                return Err(fmt_err(format!("duplicate key {key:?}")));
            }
            table
                .insert(key, values)
                .map_err(|e| fmt_err(e.to_string()))?;
        }
        Ok(table)
    }
}

fn parse_header(line: &str) -> Option<(usize, String)> {
    let rest = line.strip_prefix('#')?;
    let mut dim = None;
    let mut field = None;
    for part in rest.split_whitespace() {
        match part.split_once('=')? {
            ("dim", d) => dim = d.parse().ok(),
            ("field", f) => field = Some(f.to_string()),
            _ => return None,
        }
    }
    Some((dim?, field?))
}

impl Embedder for EmbeddingTable {
    fn dim(&self) -> usize {
        self.dim
    }

    /// Unknown tokens embed to the zero vector.
    fn embed(&self, token: &str) -> Vec<f64> {
        self.get(token)
            .map_or_else(|| vec![0.0; self.dim], <[f64]>::to_vec)
    }
}

pub fn write_embeddings(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, table.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    EmbeddingTable::parse(std::io::BufReader::new(file), &path.display().to_string())
}
