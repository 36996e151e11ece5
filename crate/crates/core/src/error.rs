use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Runtime,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error in {source_name}{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        source_name: String,
        line: Option<usize>,
        message: String,
    },

    #[error("format error in {source_name} at row {row}: {message}")]
    Format {
        source_name: String,
        row: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("selection error: {0}")]
    Selection(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("projection error: {0}")]
    Projection(String),

    #[error("zero-variance input: {0}")]
    ZeroVariance(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("missing artifact {}: {hint}", path.display())]
    MissingArtifact { path: PathBuf, hint: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(
        source_name: impl Into<String>,
        line: Option<usize>,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) => ErrorClass::Config,
            Error::Parse { .. }
            | Error::Format { .. }
            | Error::Validation(_)
            | Error::Assembly(_)
            | Error::MissingArtifact { .. }
            | Error::ZeroVariance(_)
            | Error::Shape(_) => ErrorClass::Data,
            _ => ErrorClass::Runtime,
        }
    }
}
