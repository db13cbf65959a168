use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Evaluation,
    Dimension,
    Inconsistent,
    Document,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("variable x{index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },

    #[error("division by zero: denominator vanishes at {location}")]
    DivisionByZero { location: String },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (only 1, 2 and 3 are available)")]
    UnsupportedDimension(usize),

    #[error("invalid grid resolution: {0}")]
    Resolution(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("direction is not a unit vector (norm {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("expression is not in max-affine form: {0}")]
    NotMaxAffine(String),

    #[error("ambiguous active set: branch gap {gap:e} is within the guard band above tolerance {tol:e}")]
    AmbiguousActiveSet { gap: f64, tol: f64 },

    #[error("empty polytope")]
    EmptyPolytope,

    #[error("invalid interval [{lo}, {hi}]: lower end exceeds upper end")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("malformed document: {0}")]
    Malformed(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Syntax { .. } | Error::VariableOutOfRange { .. } => ErrorKind::Parse,
            Error::DivisionByZero { .. } | Error::NonFinite(_) => ErrorKind::Evaluation,
            Error::DimensionMismatch { .. }
            | Error::UnsupportedDimension(_)
            | Error::Resolution(_)
            | Error::GridMismatch(_)
            | Error::NonUnitDirection { .. } => ErrorKind::Dimension,
            Error::NotMaxAffine(_)
            | Error::AmbiguousActiveSet { .. }
            | Error::Inconsistent(_) => ErrorKind::Inconsistent,
            Error::EmptyPolytope | Error::InvalidInterval { .. } | Error::Malformed(_) => {
                ErrorKind::Document
            }
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
