//! Library-wide error type.

use thiserror::Error;

/// Errors produced by graph construction, designs, estimators, and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A generator or design specification failed validation.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Malformed line in an edge-list, clustering, or assignment file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A clustering violated its structural invariants.
    #[error("invalid clustering: {0}")]
    InvalidClustering(String),

    /// An assignment is structurally incompatible with the design that
    /// supposedly produced it.
    #[error("inconsistent assignment: {0}")]
    InconsistentAssignment(String),

    /// An exhaustive enumeration would exceed the outcome guard.
    #[error("enumeration of {outcomes} outcomes exceeds the limit of {limit}")]
    EnumerationTooLarge { outcomes: u128, limit: u128 },

    /// A vertex flagged as effectively treated/control has zero probability
    /// of that exposure under the design; weighting it is meaningless.
    #[error("vertex {vertex} is flagged but has zero exposure probability under the design")]
    ZeroExposureProbability { vertex: usize },

    /// A theory-module formula was asked for outside its scope.
    #[error("estimand not available: {0}")]
    EstimandScope(String),

    /// Experiment configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
