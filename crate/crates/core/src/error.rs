use std::path::PathBuf;

use thiserror::Error;

use crate::diagnostics::Diagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown information unit: {0:?}")]
    UnknownUnit(String),

    #[error("document has {} blocking diagnostic(s)", .0.len())]
    InvalidDocument(Vec<Diagnostic>),

    #[error("inconsistent triple paths: {0}")]
    InconsistentPaths(String),

    #[error("unsupported export format: {0:?}")]
    UnsupportedFormat(String),

    #[error("unknown paper: {0:?}")]
    UnknownPaper(String),

    #[error("paper id is empty")]
    MissingPaperId,

    #[error("store format {found:?} is not supported (expected {expected:?})")]
    FormatVersionMismatch { found: String, expected: String },

    #[error("corrupt store: {0}")]
    CorruptStore(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownUnit(_) => "UNKNOWN_UNIT",
            Error::InvalidDocument(_) => "INVALID_DOCUMENT",
            Error::InconsistentPaths(_) => "INCONSISTENT_PATHS",
            Error::UnsupportedFormat(_) => "UNSUPPORTED_FORMAT",
            Error::UnknownPaper(_) => "UNKNOWN_PAPER",
            Error::MissingPaperId => "MISSING_PAPER_ID",
            Error::FormatVersionMismatch { .. } => "FORMAT_VERSION_MISMATCH",
            Error::CorruptStore(_) => "CORRUPT_STORE",
            Error::Io { .. } => "IO",
            Error::Json(_) => "JSON",
            Error::Csv(_) => "CSV",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
