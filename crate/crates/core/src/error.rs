use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid node set: {0}")]
    InvalidNodeSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("explicit matrix too large: N^d = {columns} exceeds guard {limit}")]
    SizeGuard { columns: usize, limit: usize },

    #[error("degree budget violated: P*beta + (lambda-1)*Q = {used} > n = {n}")]
    DegreeBudget { used: usize, n: usize },

    #[error("lagrange factor degenerate for nodes {j} and {k}")]
    DegenerateLagrange { j: usize, k: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
