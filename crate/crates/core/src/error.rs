use thiserror::Error;

/// Everything that can go wrong while building families or evaluating norms.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ordinal syntax error at byte {position}: {message}")]
    OrdinalSyntax { position: usize, message: String },

    #[error("ordinal exponents must be strictly decreasing")]
    NonDecreasingExponents,

    #[error("ordinal coefficients must be positive")]
    ZeroCoefficient,

    #[error("ordinal {0} is not a successor")]
    NotSuccessor(String),

    #[error("ordinal {0} is not a limit")]
    NotLimit(String),

    #[error("fundamental sequence index must be at least 1")]
    ZeroIndex,

    #[error("distance is undefined between identical points")]
    IdenticalPoints,

    #[error("point kind mismatch: {0}")]
    PointMismatch(String),

    #[error("sharp is undefined for sets with fewer than two points")]
    SharpUndefined,

    #[error("{what} has {size} points, above the guard of {guard}")]
    GuardExceeded {
        what: &'static str,
        size: usize,
        guard: usize,
    },

    #[error("sets overlap at point {0}")]
    Overlap(String),

    #[error("invalid family specification: {0}")]
    InvalidSpec(String),

    #[error("point {point} is not a valid branch point (need p(1)=1, p(i) in 1..i-1)")]
    BranchInvalid { point: String },

    #[error("zero vector has no norming functional")]
    ZeroVector,

    #[error("malformed functional: {0}")]
    MalformedFunctional(String),

    #[error("invalid rational literal {0:?}")]
    RationalSyntax(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dual solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
