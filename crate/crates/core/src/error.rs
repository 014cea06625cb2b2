use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while building models, configs and experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter grid is empty")]
    EmptyGrid,

    #[error("grid point {index} has dimension {found}, expected {expected}")]
    GridDimension {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("grid points {first} and {second} are identical")]
    DuplicatePoint { first: usize, second: usize },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {what} at ({row}, {col})")]
    NonFinite { what: &'static str, row: usize, col: usize },

    #[error("sigma must be finite and positive, got {0}")]
    InvalidSigma(f64),

    #[error("index {index} out of range (len {len}) for {what}")]
    OutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("theta* {requested:?} is not on the grid; nearest grid points: {nearest:?}")]
    ThetaNotOnGrid {
        requested: Vec<f64>,
        nearest: Vec<Vec<f64>>,
    },

    #[error("unknown algorithm id `{0}`")]
    UnknownAlgorithm(String),

    #[error("invalid config field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{file}: {malformed} of {total} lines malformed (first: {samples:?})")]
    Malformed {
        file: String,
        malformed: usize,
        total: usize,
        samples: Vec<String>,
    },

    #[error("empirical pool cell {theta}:{arm} has no samples and no fallback mean")]
    EmptyPoolCell { theta: usize, arm: usize },

    #[error("{0}")]
    Ingest(String),

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than runtime failure.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Io { .. } | Error::Csv(_) => false,
            Error::Scenario { source, .. } => source.is_validation(),
            _ => true,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
