use thiserror::Error;

use crate::indexset::Key;

/// Errors raised by the constructions in this crate.
///
/// A horizon that is too small to find a witness is reported as
/// [`Error::Inconclusive`], never as a refutation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot compose: codomain of the first morphism differs from domain of the second")]
    Composition,
    #[error("malformed morphism: {0}")]
    MalformedMorphism(String),
    #[error("malformed object: {0}")]
    MalformedObject(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported query: {0}")]
    Unsupported(String),
    #[error("inconclusive at horizon {horizon}: {reason}")]
    Inconclusive { horizon: usize, reason: String },
    #[error("boundary mismatch: {0}")]
    Boundary(String),
    #[error("undefined at {key}: {what}")]
    Undefined { key: Key, what: String },
    #[error("generation failed: {0}")]
    Generation(String),
}

impl Error {
    pub(crate) fn inconclusive(horizon: usize, reason: impl Into<String>) -> Self {
        Error::Inconclusive {
            horizon,
            reason: reason.into(),
        }
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Error::Inconclusive { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
