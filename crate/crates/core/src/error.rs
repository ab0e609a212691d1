//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by constructors, samplers and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("distributions over different universes ({left} vs {right} message bits)")]
    UniverseMismatch { left: usize, right: usize },

    #[error("copy fallback must be a message or bottom, not `same`")]
    SameAsFallback,

    #[error("empty sample set")]
    EmptySamples,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("infeasible parameters: {inequality} does not hold ({detail})")]
    Infeasible { inequality: String, detail: String },

    #[error("size guard exceeded: {what} needs {size} units, guard is {guard}; use a sampled mode or raise the guard")]
    GuardExceeded { what: String, size: u128, guard: u128 },

    #[error("rejection budget of {budget} consecutive draws exhausted while sampling codeword {index}")]
    RejectionBudget { budget: u64, index: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
