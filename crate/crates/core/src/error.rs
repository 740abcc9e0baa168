use thiserror::Error;

use crate::jdm::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed joint degree matrix: {0}")]
    InvalidMatrix(String),

    #[error("malformed realization: {0}")]
    InvalidRealization(String),

    #[error("class {class} (degree {degree}) has a non-integral size")]
    NonIntegralClassSize { class: usize, degree: u32 },

    #[error("joint degree matrix is not graphical ({} violation(s))", .0.len())]
    NotGraphical(Vec<Violation>),

    #[error("vertex {vertex} has degree {actual}, its class requires {expected}")]
    InconsistentDegrees {
        vertex: usize,
        expected: u32,
        actual: u32,
    },

    #[error("realization does not match the joint degree matrix")]
    JdmMismatch,

    #[error("realization is not balanced")]
    NotBalanced,

    #[error("factor {factor} could not be realized from its degree prescription")]
    Infeasible { factor: String },

    #[error("state space exceeds the cap of {cap} states")]
    CapExceeded { cap: usize },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("subset must be non-empty and proper")]
    EmptyOrFull,

    #[error("a transition leaves the enumerated state list")]
    NotClosed,

    #[error("auxiliary graph of class {class} is not half-regular")]
    HalfRegularityViolation { class: usize },

    #[error("product state space of {size} states exceeds the cap of {cap}")]
    DimensionOverflow { size: usize, cap: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
