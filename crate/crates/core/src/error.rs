use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the estimator library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bandwidth index must be non-negative, got {0}")]
    NegativeBandwidth(i64),

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("bandwidth mismatch: {left} vs {right}")]
    BandwidthMismatch { left: usize, right: usize },

    #[error("need at least {required} samples for bandwidth {b}, got {n}")]
    InsufficientSamples { n: usize, b: usize, required: usize },

    #[error("sample count must be at least 1")]
    EmptyDeployment,

    #[error("rank {rank} outside [1, {n}]")]
    RankOutOfRange { rank: usize, n: usize },

    #[error("value is not real: imaginary part {imag:e} exceeds tolerance")]
    NotReal { imag: f64 },

    #[error("coefficients are not conjugate symmetric (max deviation {deviation:e})")]
    NotConjugateSymmetric { deviation: f64 },

    #[error("grid must be ascending")]
    UnsortedGrid,

    #[error("at least {required} trials required, got {actual}")]
    InsufficientTrials { required: usize, actual: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
