use thiserror::Error;

/// Errors raised by the minority-game toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or input violates a precondition (even N, wrong profile length, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Arguments are well formed but outside the domain of the quantity asked for.
    #[error("domain error: {0}")]
    Domain(String),

    /// The equilibrium root finder could not bracket or converge.
    #[error("solver error: {0}")]
    Solver(String),

    /// An integer result does not fit the output type.
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    /// A measurement window or log is empty or missing data.
    #[error("measurement error: {0}")]
    Measurement(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! config_err {
    ($($arg:tt)*) => { $crate::error::Error::Config(format!($($arg)*)) };
}

pub(crate) use config_err;
