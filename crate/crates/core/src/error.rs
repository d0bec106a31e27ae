use thiserror::Error;

/// Errors produced by lattice construction, search and verification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QfError {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is not positive definite: leading principal minor {index} is not positive")]
    NotPositiveDefinite { index: usize },
    #[error("unsupported root lattice {family}_{rank}")]
    UnsupportedFamilyRank { family: char, rank: usize },
    #[error("middle coefficient {b} is odd; no unit-scale Gram matrix exists")]
    OddMiddleCoefficient { b: i64 },
    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),
    #[error("search budget of {budget} nodes exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("form is not in L13 (second minimum {c} < 13)")]
    NotInL13 { c: i64 },
    #[error("phi9 chain broken: {0}")]
    ChainBroken(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QfError>;
