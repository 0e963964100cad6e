use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Arguments outside the domain of an operation (bad lengths, shift past the end, ...).
    #[error("parameter domain error: {0}")]
    Domain(String),

    /// Parameters are valid but not in the regime a scheme or formula requires.
    #[error("regime error: {0}")]
    Regime(String),

    /// Broken internal invariant; always a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
