use thiserror::Error;

use crate::gumbel::GumbelParams;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: site {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("covariance factorization failed: {0}")]
    Factorization(String),

    /// A simulator declined a configuration it cannot simulate faithfully.
    #[error("simulation refused: {0}")]
    Refused(String),

    #[error("gumbel fit did not converge after {iterations} iterations (last iterate a={}, b={})", last.location, last.scale)]
    FitNonConvergence {
        iterations: usize,
        last: GumbelParams,
    },

    #[error("kendall's tau is undefined: {0}")]
    UndefinedTau(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
