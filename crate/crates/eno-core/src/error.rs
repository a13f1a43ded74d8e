//! Error type shared across the crate.

use thiserror::Error;

/// Largest supported reconstruction order / divided-difference level.
pub const MAX_ORDER: usize = 8;

/// Errors produced by mesh construction, reconstruction, verification and
/// solver routines.
#[derive(Debug, Error)]
pub enum EnoError {
    #[error("invalid range: need a < b and n >= 1, got a={a}, b={b}, n={n}")]
    InvalidRange { a: f64, b: f64, n: usize },

    #[error("interface coordinates must be strictly increasing (violated at index {index})")]
    NonMonotoneInterfaces { index: usize },

    #[error("value vector has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("operation requires cell-average semantics")]
    SemanticsMismatch,

    #[error("order {k} out of the supported range 1..={}", MAX_ORDER)]
    OrderUnsupported { k: usize },

    #[error("mesh too small: need at least {needed} cells, got {got}")]
    MeshTooSmall { needed: usize, got: usize },

    #[error("a uniform mesh is required when comparing against the sharp jump-ratio bounds")]
    NonuniformUnsupported,

    #[error("shock location {x} coincides with a cell interface; perturb the input")]
    DegenerateShock { x: f64 },

    #[error("invalid scheme configuration: {reason}")]
    InvalidConfig { reason: String },
}

pub type Result<T> = std::result::Result<T, EnoError>;
