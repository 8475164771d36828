use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("sign vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("matrix is rank deficient: rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("subspace has full dimension; no proper complement exists")]
    NoComplement,

    #[error("matrices are not Gale dual: {0}")]
    NotGaleDual(String),

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("invalid sign vector: {0}")]
    InvalidSignVector(String),

    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),

    #[error("non-positive input: {0}")]
    NonPositiveInput(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown species {0:?}")]
    UnknownSpecies(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("witness verification failed: {0}")]
    VerificationFailed(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
