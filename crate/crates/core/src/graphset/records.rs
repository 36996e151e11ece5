use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::id::{parse_id, FailureModeId};
use crate::error::{Error, Result};

pub const RECORD_FIELDS: [&str; 8] = [
    "id",
    "system",
    "subsystem",
    "component",
    "failure_mode",
    "failure_reason",
    "failure_effect",
    "emergency_measure",
];

/// One failure mode and its seven descriptive fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub id: FailureModeId,
    pub system: String,
    pub subsystem: String,
    pub component: String,
    pub failure_mode: String,
    pub failure_reason: String,
    pub failure_effect: String,
    pub emergency_measure: String,
    pub label: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    system: String,
    subsystem: String,
    component: String,
    failure_mode: String,
    failure_reason: String,
    failure_effect: String,
    emergency_measure: String,
}

impl FailureRecord {
    /// Subsystem and component text joined, the input of the word-level field.
    pub fn sub_com_text(&self) -> String {
        format!("{} {}", self.subsystem, self.component)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordFormat {
    Csv,
    Jsonl,
}

impl RecordFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("csv") => Ok(RecordFormat::Csv),
            Some("jsonl") | Some("ndjson") => Ok(RecordFormat::Jsonl),
            _ => Err(Error::Config(format!(
                "cannot infer record format of {}; use a .csv or .jsonl extension",
                path.display()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IngestMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub records: Vec<FailureRecord>,
    pub skipped: Vec<RowError>,
}

struct Validator {
    system_names: BTreeMap<(u8, u8), String>,
    seen: BTreeSet<FailureModeId>,
}

impl Validator {
    fn check(&mut self, raw: RawRecord) -> std::result::Result<FailureRecord, String> {
        let fields = [
            ("id", &raw.id),
            ("system", &raw.system),
            ("subsystem", &raw.subsystem),
            ("component", &raw.component),
            ("failure_mode", &raw.failure_mode),
            ("failure_reason", &raw.failure_reason),
            ("failure_effect", &raw.failure_effect),
            ("emergency_measure", &raw.emergency_measure),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| v.trim().is_empty()) {
            return Err(format!("field {name} is empty"));
        }
        let id = parse_id(raw.id.trim()).map_err(|e| e.to_string())?;
        let label = id.label().ok_or_else(|| {
            format!(
                "id {id} names unknown system {} in category {}",
                id.system, id.category
            )
        })?;
        let system = raw.system.trim().to_string();
        match self.system_names.get(&(id.category, id.system)) {
            Some(prev) if !prev.eq_ignore_ascii_case(&system) => {
                return Err(format!(
                    "id {id} says system {}{} but the row names {system:?}, earlier rows named {prev:?}",
                    id.category, id.system
                ))
            }
            Some(_) => {}
            None => {
                self.system_names.insert((id.category, id.system), system.clone());
            }
        }
        if !self.seen.insert(id) {
            return Err(format!("duplicate id {id}"));
        }
        Ok(FailureRecord {
            id,
            system,
            subsystem: raw.subsystem.trim().to_string(),
            component: raw.component.trim().to_string(),
            failure_mode: raw.failure_mode.trim().to_string(),
            failure_reason: raw.failure_reason.trim().to_string(),
            failure_effect: raw.failure_effect.trim().to_string(),
            emergency_measure: raw.emergency_measure.trim().to_string(),
            label,
        })
    }
}

fn collect(
    rows: impl Iterator<Item = (usize, std::result::Result<RawRecord, String>)>,
    mode: IngestMode,
    source_name: &str,
) -> Result<IngestReport> {
    let mut v = Validator {
        system_names: BTreeMap::new(),
        seen: BTreeSet::new(),
    };
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (line, raw) in rows {
        match raw.and_then(|r| v.check(r)) {
            Ok(r) => records.push(r),
            Err(message) => match mode {
                IngestMode::Strict => return Err(Error::parse(source_name, Some(line), message)),
                IngestMode::Lenient => {
                    log::warn!("{source_name} line {line}: {message}; row skipped");
                    skipped.push(RowError { line, message });
                }
            },
        }
    }
    Ok(IngestReport { records, skipped })
}

pub fn parse_records_csv(
    reader: impl std::io::Read,
    source_name: &str,
    mode: IngestMode,
) -> Result<IngestReport> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(source_name, Some(1), e.to_string()))?
        .clone();
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    if names != RECORD_FIELDS {
        return Err(Error::parse(
            source_name,
            Some(1),
            format!("header {names:?} does not match {RECORD_FIELDS:?}"),
        ));
    }
    let rows: Vec<(usize, std::result::Result<RawRecord, String>)> = rdr
        .records()
        .enumerate()
        .map(|(i, rec)| {
            let line = rec
                .as_ref()
                .ok()
                .and_then(|r| r.position())
                .map_or(i + 2, |p| p.line() as usize);
            let parsed = rec.map_err(|e| e.to_string()).and_then(|r| {
                r.deserialize::<RawRecord>(Some(&headers))
                    .map_err(|e| e.to_string())
            });
            (line, parsed)
        })
        .collect();
    collect(rows.into_iter(), mode, source_name)
}

pub fn parse_records_jsonl(
    reader: impl BufRead,
    source_name: &str,
    mode: IngestMode,
) -> Result<IngestReport> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source_name, e))?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push((
            i + 1,
            serde_json::from_str::<RawRecord>(&line).map_err(|e| e.to_string()),
        ));
    }
    collect(rows.into_iter(), mode, source_name)
}

pub fn ingest_records(
    path: impl AsRef<Path>,
    format: Option<RecordFormat>,
    mode: IngestMode,
) -> Result<IngestReport> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => RecordFormat::from_path(path)?,
    };
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    match format {
        RecordFormat::Csv => parse_records_csv(file, &name, mode),
        RecordFormat::Jsonl => parse_records_jsonl(std::io::BufReader::new(file), &name, mode),
    }
}
