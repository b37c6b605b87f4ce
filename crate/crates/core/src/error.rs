use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library.
///
/// Contract violations (mismatched dimensions, non-positive regularizers,
/// non-finite coordinates) panic instead; they indicate a caller bug rather
/// than a recoverable condition.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("posterior variance {variance:e} fell below -1e-6 before clamping; the Gram factor is ill-conditioned")]
    NegativeVariance { variance: f64 },

    #[error("RKHS quadratic form evaluated to {0:e}, below -1e-8")]
    NegativeNorm(f64),

    #[error("Cholesky factorization failed at pivot {pivot} (value {value:e})")]
    Factorization { pivot: usize, value: f64 },

    #[error("policy `{0}` is an unimplemented baseline")]
    UnimplementedBaseline(String),

    #[error("schedule fit needs at least {required} certified steps, found {found}")]
    InsufficientSteps { required: usize, found: usize },

    #[error("confidence bound violated at step {step}, candidate {index}: |f - mu| = {deviation:e} > {allowed:e}")]
    ConfidenceViolation {
        step: usize,
        index: usize,
        deviation: f64,
        allowed: f64,
    },

    #[error("malformed results file {path}: {reason}")]
    MalformedResults { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
