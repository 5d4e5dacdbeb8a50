use thiserror::Error;

/// Errors produced by the perturbation engine and its oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("eigenvalue {index} is not simple (gap {gap:e})")]
    DegenerateGap { index: usize, gap: f64 },

    /// A bound's precondition does not hold. This is not a numerical failure.
    #[error("{bound} is inapplicable: {reason}")]
    Inapplicable { bound: &'static str, reason: String },

    #[error("series does not contract: {0}")]
    Divergence(String),

    #[error("contour passes within {distance:e} of eigenvalue {eigenvalue}")]
    ContourTooClose { eigenvalue: f64, distance: f64 },

    #[error("finite-difference stencil is not admissible: {0}")]
    Stencil(String),

    #[error("contour quadrature did not settle: {0}")]
    Quadrature(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
