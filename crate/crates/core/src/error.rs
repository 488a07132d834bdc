use thiserror::Error;

use crate::expr::ExprError;

/// Errors raised by the library. Negative verdicts (a violated axiom, a
/// failed contractive condition) are reported through report types, not here.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("space has no elements")]
    EmptySpace,

    #[error("distance matrix is {rows}x{cols} but the space has {elements} elements")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        elements: usize,
    },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("point does not belong to this backend: {0}")]
    BackendMismatch(String),

    #[error("vector has length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },

    #[error("point {point:?} lies outside the domain box")]
    OutOfDomain { point: Vec<f64> },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("map table is incomplete or inconsistent: {0}")]
    IncompleteMap(String),

    #[error("invalid sampling grid: {0}")]
    InvalidGrid(String),

    #[error("start condition unmet: {0}")]
    StartConditionUnmet(String),

    #[error("trace too short: {0}")]
    TraceTooShort(String),

    #[error("instance generation failed: {0}")]
    GenerationFailed(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
