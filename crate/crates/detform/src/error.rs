//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular or not finite")]
    SingularMatrix,

    #[error("shape matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("degenerate fiber: second coordinate vanishes")]
    DegenerateFiber,

    #[error("evaluation on the projective line at infinity (xi~_0 = 0)")]
    ProjectiveSingularPoint,

    #[error("invalid exponents: {0}")]
    InvalidExponents(String),

    #[error("bump supports overlap: {0}")]
    SupportOverlap(String),

    #[error("determinant sign violation on counterexample support at x={x:?} y={y:?}")]
    DeterminantSign { x: [f64; 2], y: [f64; 2] },

    #[error("mollifier width {0} too large: ramps would overlap")]
    MollifierTooWide(f64),

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
