//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QpError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("flat index {index} out of range for lattice of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("invalid size vector: {0}")]
    InvalidSizes(String),

    #[error("invalid projection matrix: {0}")]
    InvalidProjection(String),

    #[error("term index {0:?} lies outside the truncation window (would alias)")]
    TermOutsideWindow(Vec<i64>),

    #[error("size or projection mismatch between operands")]
    FieldMismatch,

    #[error("coefficient is not flagged real-valued")]
    NotRealValued,

    #[error("ellipticity violation: coefficient mean value {0} has non-positive real part")]
    EllipticityViolation(f64),

    #[error("dense operator of dimension {dim} exceeds cap {cap}")]
    DenseCap { dim: usize, cap: usize },

    #[error("singular preconditioner: zero diagonal entry at column {0}")]
    SingularPreconditioner(usize),

    #[error("right-hand side incompatible at the zero mode: |F_0| = {0:.3e}")]
    ZeroModeIncompatible(f64),

    #[error("iteration breakdown: non-finite inner product at iteration {0}")]
    Breakdown(usize),

    #[error("solver did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error("expression error: {0}")]
    Expr(String),

    #[error("malformed QPCS stream: {0}")]
    QpcsFormat(String),

    #[error("refusing to overwrite {0} (pass overwrite to allow)")]
    WouldOverwrite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QpError>;
