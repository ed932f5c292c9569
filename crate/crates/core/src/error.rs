use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// `e^r` is not representable, so `M(r)` cannot be evaluated directly.
    #[error("overflow: M({r}) exceeds the f64 range")]
    Overflow { r: f64 },

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("orbit disagrees with recomputation at index {index} (difference {diff:e})")]
    OrbitMismatch { index: usize, diff: f64 },

    #[error("access arc construction failed: {0}")]
    ArcConstruction(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("branch cut collision at step {step}: {point}")]
    BranchCut { step: usize, point: String },

    #[error("hair did not converge: endpoint gap {gap:e} above {tol:e}")]
    NonConvergence { gap: f64, tol: f64 },

    #[error("certificate check failed at {} sample(s): {}", .samples.len(), .reason)]
    Certificate { reason: String, samples: Vec<[f64; 2]> },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
