use std::path::PathBuf;

/// Errors produced by the clustering library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("input contains no data points")]
    EmptyInput,

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("k must be between 1 and n = {n}, got {k}")]
    InvalidK { k: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("multiplier {value:e} is negative beyond the clipping threshold")]
    NegativeMultiplier { value: f64 },

    #[error("points {0} and {1} are cannot-linked and cannot be merged")]
    InfeasibleMerge(usize, usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
