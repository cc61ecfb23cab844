use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV parse error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("ragged row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("non-finite values in column {column} at rows {rows:?}")]
    NonFinite { column: String, rows: Vec<usize> },

    #[error("invalid binning: {0}")]
    Binning(String),

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("feature {feature}: category index {index} out of range (feature has {count} categories)")]
    CategoryOutOfRange {
        feature: usize,
        index: usize,
        count: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("conflicting marks: two items on feature {0}")]
    ConflictingMark(usize),

    #[error("unknown item: {0}")]
    UnknownItem(String),

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("model/schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("brute-force oracle limited to {limit} categories, got {found}")]
    OracleGuard { limit: usize, found: usize },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
