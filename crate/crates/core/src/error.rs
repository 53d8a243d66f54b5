use thiserror::Error;

/// Errors raised by the model, filter and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(
        "quadrature failed to reach tolerance {tol:e} within {panels} panels (estimate {estimate}, error {error:e})"
    )]
    Quadrature {
        tol: f64,
        panels: usize,
        estimate: f64,
        error: f64,
    },

    #[error("series failed to converge after {terms} terms")]
    SeriesDivergence { terms: usize },

    #[error("degenerate particle cloud: all weights are zero")]
    DegenerateCloud,

    #[error("weights are not normalized (sum = {0})")]
    Unnormalized(f64),

    #[error("non-finite value produced: {0}")]
    NonFinite(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of numerical routines rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::SeriesDivergence { .. } | Error::DegenerateCloud | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
