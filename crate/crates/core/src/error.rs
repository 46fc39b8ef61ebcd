//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HoloError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid group parameter: {0}")]
    InvalidGroup(String),

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("operator is not antisymmetric (defect {defect:.3e})")]
    NotAntisymmetric { defect: f64 },

    #[error("subspace is not proper: dimension {dim} in ambient dimension {ambient}")]
    NotProper { dim: usize, ambient: usize },

    #[error("subspace is not invariant under operator {index} (residual {residual:.3e})")]
    NotInvariant { index: usize, residual: f64 },

    #[error("initial vector is not tangent at the base point (|<X,x>| = {residual:.3e})")]
    NotTangent { residual: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("construction failed: {0}")]
    ConstructionFailure(String),
}

pub type Result<T> = std::result::Result<T, HoloError>;
