use thiserror::Error;

/// Errors surfaced by the simulation and estimation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// The circulant embedding produced an eigenvalue more negative than the
    /// clipping tolerance; callers should fall back to the Cholesky sampler.
    #[error("circulant embedding failed: eigenvalue {min_eigenvalue:e} below -{tolerance:e}")]
    EmbeddingFailure { min_eigenvalue: f64, tolerance: f64 },

    /// Cholesky sampling is an O(n^2)-memory oracle; grids beyond the guard are refused.
    #[error("grid count {count} exceeds the Cholesky sampler guard of {max}")]
    SizeExceeded { count: usize, max: usize },

    /// The increment covariance matrix failed to factor; indicates a tolerance bug.
    #[error("covariance matrix not positive definite at pivot {pivot}")]
    NotPositiveDefinite { pivot: usize },

    #[error("domain error: {0}")]
    Domain(String),

    /// Functional and field dimensionality do not match.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("insufficient points: need at least {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    /// A study was configured outside the hypotheses of the limit theorem it probes.
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error ({key}): {msg}")]
    Config { key: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }
}
