use alloc::string::String;
use thiserror::Error;

/// Errors from code construction, encoding and matrix handling.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("rank deficient: expected rank {expected}, got {actual}")]
    RankDeficient { expected: usize, actual: usize },
    #[error("generator and parity-check matrices are not orthogonal")]
    NotOrthogonal,
    #[error("column order is not a permutation")]
    InvalidPermutation,
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),
}

/// Errors from the soft-decision decoders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("LLR length {actual} does not match block length {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("OSD order {order} exceeds code dimension {k}")]
    OrderTooLarge { order: usize, k: usize },
    #[error("brute-force decoding refused for k = {k} (limit {limit})")]
    TooLarge { k: usize, limit: usize },
}
