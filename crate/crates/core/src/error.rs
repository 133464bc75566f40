use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid speed vector: {0}")]
    InvalidSpeeds(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),

    #[error("solver lost feasibility: max constraint violation {violation:.3e}")]
    NumericalTrouble { violation: f64 },

    #[error("coefficient recovery failed: odd/imaginary energy {energy:.3e} exceeds tolerance")]
    NotEvenTrigPoly { energy: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("closed-form check failed: {0}")]
    ClosedFormCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
