use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MubError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("prime {p} exceeds the supported exponent range (p < 256)")]
    PrimeTooLarge { p: u32 },
    #[error("prime {p} exceeds the resource guard (max {max})")]
    GuardExceeded { p: u32, max: u32 },
    #[error("independence is undefined for the identity word")]
    IdentityWord,
    #[error("generators do not commute: not isotropic")]
    NotIsotropic,
    #[error("generators are dependent: rank deficient")]
    RankDeficient,
    #[error("classes belong to different primes ({0} vs {1})")]
    PrimeMismatch(u32, u32),
    #[error("classes are not disjoint")]
    NotDisjoint,
    #[error("degenerate commutation constant (k = 0)")]
    DegenerateCommutationConstant,
    #[error("expected a subset of {expected} classes, got {got}")]
    WrongSubsetSize { expected: usize, got: usize },
    #[error("subset index {index} out of range for a set of {len} classes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("subset admits no new class")]
    NoNewClass,
    #[error("invalid class set: {0}")]
    InvalidClassSet(String),
    #[error("inconsistent basis label: {0}")]
    InconsistentLabel(String),
    #[error("projector is not rank one (trace {trace}, idempotency error {error})")]
    NotRankOne { trace: f64, error: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("operation requires p = {expected}, got {got}")]
    WrongPrime { expected: u32, got: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed record: {0}")]
    Record(String),
}

pub type Result<T> = std::result::Result<T, MubError>;
