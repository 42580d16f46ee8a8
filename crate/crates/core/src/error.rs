use alloc::string::String;

/// Errors raised by the measure, estimator and sampling routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integral failed to converge, or is known to be infinite.
    #[error("divergence: {0}")]
    Divergence(String),

    /// Not enough observations for the requested estimator.
    #[error("sample too small: need at least {needed} observations, got {got}")]
    SampleSize { needed: usize, got: usize },

    /// An estimator or design parameter is out of range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A textual specification could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}
macro_rules! divergence {
    ($($arg:tt)*) => { $crate::Error::Divergence(alloc::format!($($arg)*)) };
}
macro_rules! parameter {
    ($($arg:tt)*) => { $crate::Error::Parameter(alloc::format!($($arg)*)) };
}
macro_rules! parse_err {
    ($($arg:tt)*) => { $crate::Error::Parse(alloc::format!($($arg)*)) };
}

pub(crate) use {divergence, domain, parameter, parse_err};
