use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{e} is too large")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("a modulus is required for extension degree {0}")]
    MissingModulus(u32),
    #[error("a modulus must not be given for a prime field")]
    UnexpectedModulus,
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("subspaces live in different ambient spaces")]
    AmbientMismatch,
    #[error("the geometry would have {total} vertices, above the limit of {limit}")]
    SizeLimitExceeded { total: u128, limit: usize },
    #[error("N must be at least 1")]
    EmptyAmbient,
    #[error("index {index} is out of range 0..={max}")]
    OutOfRange { index: usize, max: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("eigenvalues {0} and {1} coincide")]
    DuplicateEigenvalue(usize, usize),
    #[error("check refused: {0}")]
    SpectrumRefused(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown check group '{0}'")]
    UnknownCheck(String),
    #[error("unknown dump target '{0}'")]
    UnknownTarget(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
