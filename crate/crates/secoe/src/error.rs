//! Error and result types shared across the crate.

use std::path::PathBuf;

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {msg}")]
    Csv { path: PathBuf, msg: String },

    /// Cell-level parse failure; `row` is the 1-based data row (header
    /// excluded), `col` the 1-based column in the original file.
    #[error("csv parse error in {path} at data row {row}, column {col}: {msg}")]
    CsvCell {
        path: PathBuf,
        row: usize,
        col: usize,
        msg: String,
    },

    #[error("label column {0} not found")]
    LabelColumnMissing(String),

    #[error("{0}")]
    EmptyInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("split with train fraction {fraction} leaves the {side} partition empty (n = {n})")]
    DegenerateSplit {
        fraction: f64,
        side: &'static str,
        n: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Failure while encoding artifacts the library itself produced.
    #[error("serialization failure: {0}")]
    Serialize(String),

    #[error("invalid model bundle: {0}")]
    InvalidBundle(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
