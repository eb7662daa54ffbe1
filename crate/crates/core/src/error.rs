//! Error type shared by every stage of the pipeline.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Error, Debug)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv parse error at row {row}, column {col}: {message}")]
    CsvParse {
        row: usize,
        col: usize,
        message: String,
    },
    #[error("csv row {row} has {found} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("coordinate at point {index} is not finite")]
    NonFiniteCoordinate { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: String, message: String },
    #[error("k = {k} exceeds reference set size {available}")]
    NeighborCountTooLarge { k: usize, available: usize },
    #[error("dataset of size {n} is too small: {message}")]
    DatasetTooSmall { n: usize, message: String },
    #[error("degenerate ranking: all points fall in a single quantization level")]
    DegenerateRanking,
    #[error("model has no support pairs")]
    UntrainedModel,
    #[error("model archive version {found} is not supported (expected {expected})")]
    ArchiveVersion { expected: u32, found: u32 },
    #[error("model archive is corrupt: {message}")]
    ArchiveCorrupt { message: String },
    #[error("covariance matrix of component {component} is not positive definite")]
    NotPositiveDefinite { component: usize },
    #[error("all cross-validation cells were skipped")]
    AllCellsSkipped,
    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(name: &str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
