//! Error type shared by every module, with the CLI exit-code mapping.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("coefficient fields are incompatible")]
    FieldMismatch,
    #[error("coefficient field would require an extension tower (offending minimal polynomial: {minimal_polynomial})")]
    ExtensionTower { minimal_polynomial: String },
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("infinite type: {witness}")]
    InfiniteType { witness: String },
    #[error("common branch, multiplicity is infinite: {0}")]
    CommonBranch(String),
    #[error("genericity retries exhausted: {0}")]
    GenericityExhausted(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("outside supported scope: {0}")]
    Unsupported(String),
}

impl Error {
    /// Process exit code used by the `kohn` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::InvalidInput(_) => 2,
            Error::InfiniteType { .. } | Error::CommonBranch(_) => 3,
            Error::Precision(_) => 4,
            Error::ExtensionTower { .. } | Error::FieldMismatch => 5,
            Error::GenericityExhausted(_) => 6,
            Error::InvariantViolation(_) => 7,
            Error::Unsupported(_) => 1,
        }
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
