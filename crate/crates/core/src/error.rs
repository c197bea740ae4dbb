use alloc::string::String;

/// Errors raised by the calculus.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition part {part} exceeds rank {rank}")]
    PartExceedsRank { part: usize, rank: usize },

    #[error("invalid dimension sequence: {0}")]
    InvalidDimensionSequence(String),

    #[error("invalid universal bundle: {0}")]
    InvalidBundle(String),

    #[error("Chern index {index} out of range for {bundle} of rank {rank}")]
    ChernIndexOutOfRange {
        index: usize,
        rank: usize,
        bundle: String,
    },

    #[error("rank mismatch: expected {expected}, got {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("polynomial is not weighted-homogeneous")]
    NotHomogeneous,

    #[error("expected degree {expected}, got {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("polynomial is not symmetric in the Chern roots")]
    NotSymmetric,

    #[error("symmetrization did not produce a polynomial")]
    NonPolynomialSymmetrization,

    #[error("rank {rank} exceeds the supported maximum {max}")]
    RankTooLarge { rank: usize, max: usize },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("generator spaces differ ({0} vs {1})")]
    GeneratorMismatch(usize, usize),

    #[error("expected a ({expected},{expected})-form")]
    WrongBidegree { expected: usize },

    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("metric is not positive definite")]
    NotPositiveDefinite,

    #[error("finite-difference curvature is not Hermitian (defect {0:e}); step too large")]
    StepTooLarge(f64),

    #[error("all sampled rays are zero")]
    AllRaysZero,

    #[error("target vector is zero")]
    ZeroTarget,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
