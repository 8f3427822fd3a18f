use thiserror::Error;

/// Errors produced by the tail library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("quadrature did not reach tolerance: value {value:e}, achieved error {achieved:e}, requested {requested:e}")]
    Quadrature {
        value: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("root bracket failure: {0}")]
    Bracket(String),

    #[error("no critical direction: {0}")]
    NoCriticalDirection(String),

    #[error("side condition violated at x = {point}: z(x) = {value} exceeds a/alpha = {bound}")]
    SideCondition { point: f64, value: f64, bound: f64 },

    #[error("truncation bound unreachable (partial value {partial:e}): {reason}")]
    Truncation { partial: f64, reason: String },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("degenerate regression: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
