use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Cholesky factorization broke down; `minor` is the 1-based order of the
    /// first leading minor that was not positive.
    #[error("covariance is not positive definite: leading minor of order {minor} failed")]
    NotPositiveDefinite { minor: usize },

    #[error("covariance for configuration {config} (dimension {dim}) is not positive definite")]
    ConfigFactorization { config: String, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration over {size} hypotheses refused (limit {limit})")]
    TooLarge { size: usize, limit: usize },

    #[error("no pairs with gap exceeding rho*m (m = {m}, rho = {rho})")]
    NoDistantPairs { m: usize, rho: f64 },

    #[error(
        "autocovariance repair failed: no shrink factor yields a positive definite Toeplitz matrix"
    )]
    RepairFailed,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerical core (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::ConfigFactorization { .. }
                | Error::RepairFailed
                | Error::NoDistantPairs { .. }
        )
    }
}
