use alloc::string::String;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter is out of range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Input data violates a domain requirement (negative entries, NaN, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Too few rows or columns.
    #[error("size error: {0}")]
    Size(String),
    /// Mismatched lengths or malformed structure.
    #[error("structural error: {0}")]
    Structure(String),
    /// A linear-algebra step failed or a result is undefined.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Exact integer arithmetic would overflow.
    #[error("overflow: {0}")]
    Overflow(String),
    /// An inconsistent method configuration.
    #[error("configuration error: {0}")]
    Configuration(String),
}

pub type Result<T> = core::result::Result<T, Error>;
