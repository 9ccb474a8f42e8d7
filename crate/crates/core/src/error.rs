use thiserror::Error;

use crate::engine::RunReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("need at least two objectives, got {0}")]
    TooFewObjectives(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("image {index} duplicates an earlier image")]
    DuplicateImage { index: usize },
    #[error("item {item} has negative weight {weight}")]
    NegativeWeight { item: usize, weight: i64 },
    #[error("capacity {0} is negative")]
    NegativeCapacity(i64),
    #[error("variable {var} has lower bound {lower} above upper bound {upper}")]
    EmptyDomain { var: usize, lower: i64, upper: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarizeError {
    #[error("query has {got} objectives but the instance has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("verification failed: {0}")]
    VerificationMismatch(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("backend failure after {} scalarizations: {source}", partial.scalarizations_solved)]
    Backend {
        source: ScalarizeError,
        partial: Box<RunReport>,
    },
    #[error(transparent)]
    Setup(#[from] ScalarizeError),
}
