//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for construction, parsing, fault handling, analysis
/// and simulation failures.
///
/// Everything user-facing carries enough context to be printed as-is; parse
/// errors include the 1-based source line.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("state vector is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("matrix is not unitary (max |U†U − I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("circuit width {0} outside the supported range 1..=12")]
    WidthOutOfRange(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid fault: {0}")]
    InvalidFault(String),

    #[error("invalid fault selector `{selector}`: {message}")]
    InvalidSelector { selector: String, message: String },

    #[error("invalid partition boundaries: {0}")]
    InvalidBoundaries(String),

    #[error("confidence must lie strictly between 0 and 1, got {0}")]
    InvalidConfidence(f64),

    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("invalid trial plan: {0}")]
    InvalidPlan(String),
}
