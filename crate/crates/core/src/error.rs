use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("degree guard: rate-0 degree {degree} would exceed {limit}; lower n")]
    DegreeGuard { degree: usize, limit: usize },

    #[error("weight sequence: {0}")]
    Weight(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}
