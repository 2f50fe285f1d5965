use thiserror::Error;

use crate::model::BasisTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis mismatch: model expects {expected:?}, state is {found:?}")]
    BasisMismatch { expected: BasisTag, found: BasisTag },

    #[error("point {re}{im:+}i lies in the gauge singular set")]
    GaugeSingular { re: f64, im: f64 },

    #[error("shifted operator is singular at {re}{im:+}i")]
    SingularSolve { re: f64, im: f64 },

    #[error("{x} is not an eigenvalue (relative residual {residual:e})")]
    NotEigenvalue { x: f64, residual: f64 },

    #[error("degenerate interpolation node at {x}: |G'| = {derivative:e}")]
    DegenerateNode { x: f64, derivative: f64 },

    #[error("invalid structure-function anchor: {0}")]
    InvalidAnchor(String),

    #[error("state has nonzero top coefficient; multiplication by z leaves the space")]
    DegreeOverflow,

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),
}
