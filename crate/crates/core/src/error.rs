use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the multibag library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("non-numeric cell at ({row}, {col}) in {path}: {value:?}")]
    NonNumeric {
        path: PathBuf,
        row: usize,
        col: usize,
        value: String,
    },

    #[error("row id mismatch: {0}")]
    RowIdMismatch(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("row index {row} out of range for {n_rows} rows")]
    RowOutOfRange { row: usize, n_rows: usize },

    #[error("lists index different row counts ({expected} vs {found})")]
    RowCountMismatch { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
