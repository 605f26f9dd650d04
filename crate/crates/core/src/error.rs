use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AqgError {
    #[error("division by zero")]
    DivisionByZero,

    #[error("spectrum violation: eigenvalue {0} is not strictly positive")]
    SpectrumViolation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("elements belong to different presentations")]
    MixedPresentations,

    #[error("degree {requested} exceeds the available truncation {available}")]
    DegreeOverflow { requested: usize, available: usize },

    #[error("integral not faithful or truncation too small: {0}")]
    Singular(String),

    #[error("linear system inconsistent: {0}")]
    Inconsistent(String),

    #[error("image escapes truncation at degree {degree}; retry at degree {required}")]
    NotClosed { degree: usize, required: usize },

    #[error("operator not diagonalizable: {0}")]
    NotDiagonalizable(String),

    #[error("rewriting system not confluent: {0}")]
    NotConfluent(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("identity failed: {0}")]
    CheckFailed(String),

    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, AqgError>;
