use std::fmt;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operand length does not match the ring degree.
    LengthMismatch { expected: usize, got: usize },
    /// Invalid ring descriptor.
    InvalidRing(String),
    /// Galois index is not a unit of the ring's index group.
    NotAUnit(i64),
    /// Polynomial is not invertible modulo the requested power of two.
    NotInvertible,
    /// Covariance left for the continuous stage is not positive definite.
    NotPositiveDefinite,
    /// Invalid sampler or parameter input.
    InvalidParameter(String),
    /// Key generation exhausted its restart budget.
    KeygenExhausted { restarts: usize },
    /// Signing was rejected by the norm check too many times in a row.
    SigningExhausted { attempts: usize },
    /// Byte string is not a valid encoding.
    MalformedEncoding(String),
    /// Unknown parameter set name or id.
    UnknownParamSet(String),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::InvalidRing(msg) => write!(f, "invalid ring: {msg}"),
            Error::NotAUnit(k) => write!(f, "galois index {k} is not a unit"),
            Error::NotInvertible => write!(f, "polynomial is not invertible"),
            Error::NotPositiveDefinite => write!(f, "perturbation covariance is not positive definite"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::KeygenExhausted { restarts } => {
                write!(f, "key generation failed after {restarts} restarts")
            }
            Error::SigningExhausted { attempts } => {
                write!(f, "signing failed after {attempts} attempts")
            }
            Error::MalformedEncoding(msg) => write!(f, "malformed encoding: {msg}"),
            Error::UnknownParamSet(name) => write!(f, "unknown parameter set: {name}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
