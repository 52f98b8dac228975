use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector entry {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("vector must have at least one entry")]
    EmptyVector,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("alphas must sum to 1 (sum = {sum})")]
    AlphaSum { sum: f64 },

    #[error("interpolation alphas must lie in [0, 1] (alpha[{index}] = {value})")]
    AlphaRange { index: usize, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{0}")]
    Precondition(String),

    #[error("no certificate: theta = {theta} >= 1")]
    NoCertificate { theta: f64 },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    RootsNotConverged { iterations: usize, residual: f64 },

    #[error("not enough usable entries for a rate fit ({usable} < {required})")]
    TooFewEntries { usable: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
