//! Exact rational models of truncations, intersection spaces and Poincare
//! duality approximations of pseudomanifolds with isolated singularities.

pub mod cdga;
pub mod cli;
pub mod exactq;
pub mod quadforms;
pub mod spaces;
pub mod truncation;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent input.
    #[error("input error: {0}")]
    Input(String),
    /// Input is well formed but violates a hypothesis of the construction.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// No construction exists for this kind of space.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A computed object failed one of its own invariants.
    #[error("internal invariant failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 1,
            Error::Precondition(_) | Error::Unsupported(_) => 2,
            Error::Internal(_) => 3,
        }
    }
}

impl From<exactq::ExactError> for Error {
    fn from(e: exactq::ExactError) -> Self {
        Error::Input(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
