use thiserror::Error;

/// Errors raised by the algebra and enumeration layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("cannot enumerate {0}: the field is infinite")]
    InfiniteField(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("mismatched base fields")]
    FieldMismatch,
    #[error("Krull dimension {0} is too large (depth computations are limited to dimension <= 1)")]
    DimensionTooLarge(usize),
    #[error("the zero module has no primary filtration")]
    ZeroModule,
    #[error("operation not supported by the {backend} backend: {what}")]
    UnsupportedBackend { backend: String, what: String },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            column,
            message: message.into(),
        }
    }

    pub(crate) fn unsupported(backend: &str, what: impl Into<String>) -> Self {
        Error::UnsupportedBackend {
            backend: backend.to_string(),
            what: what.into(),
        }
    }
}
