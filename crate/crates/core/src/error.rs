use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group mismatch")]
    GroupMismatch,
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid group element: {0}")]
    InvalidElement(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a complex: {0}")]
    NotAComplex(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("not an admissible decomposition: {0}")]
    NotAdmissible(String),
    #[error("unsupported coefficient regime for this group: {0}")]
    UnsupportedRegime(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("non-consecutive path: {0}")]
    NonConsecutivePath(String),
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("not an isomorphism: {0}")]
    NotBijective(String),
    #[error("inconsistent incidence data: {0}")]
    InconsistentIncidence(String),
    #[error("inconsistent Morse data: {0}")]
    InconsistentMorse(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
