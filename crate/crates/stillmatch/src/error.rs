//! Crate-wide error type. Every fallible operation returns [`Result`].

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector needs at least 2 components, got {0}")]
    TooFewComponents(usize),

    #[error("non-finite component at index {0}")]
    NotFinite(usize),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("negative component at index {0} cannot be projected onto the simplex")]
    NegativeFeature(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("probe sequence has no frames")]
    EmptyProbe,

    #[error("unknown class {0}")]
    UnknownClass(usize),

    #[error("gallery has no instances")]
    EmptyGallery,

    #[error("class {0} has no instances")]
    MissingClass(usize),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("degenerate case: {0}")]
    DegenerateCase(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
