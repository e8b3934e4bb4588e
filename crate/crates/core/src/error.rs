use std::path::PathBuf;

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical routines and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented invariant (coefficient bound, probability vector, ...).
    #[error("invalid {field}: {message}")]
    InvalidInput { field: &'static str, message: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("root finding failed after {iterations} iterations (worst residual {residual:e})")]
    RootFindingFailed { iterations: usize, residual: f64 },

    #[error("backward orbit {orbit} failed: {source}")]
    OrbitFailed {
        orbit: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("no convergence after {steps} steps")]
    NoConvergence { steps: usize },

    #[error("fixed point {point} is not repelling (|P'| = {multiplier})")]
    NotRepelling { point: Complex64, multiplier: f64 },

    #[error("preimage tree of {leaves} leaves exceeds the limit of {limit}")]
    TreeTooLarge { leaves: u128, limit: u128 },

    #[error("observable is not finite at {point}")]
    NonFiniteObservable { point: Complex64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field,
            message: message.into(),
        }
    }

    /// True for errors caused by user input rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput { .. } | Error::DegenerateInput(_) | Error::Parse { .. }
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
