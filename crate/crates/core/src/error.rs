use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("series is zero to its truncation order")]
    ZeroSeries,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("path does not lie on the central component: {0}")]
    NotOnComponent(String),
    #[error("dF/dt vanishes identically along the component (multiplicity > 1)")]
    DegenerateTransversal,
    #[error("arc matrix is singular to its truncation order")]
    SingularArc,
    #[error("truncation too small to certify: {0}")]
    InsufficientTruncation(String),
    #[error("vanishing order reached the truncation bound {0}")]
    TruncationExceeded(usize),
    #[error("maximal extension did not stabilise below the cap {cap}")]
    NoStabilization { cap: usize },
    #[error("restricted sections are linearly dependent (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },
    #[error("quadrature failed: {0}")]
    QuadratureDivergence(String),
    #[error("zero vector")]
    ZeroVector,
    #[error("cycle is not invariant under the one-parameter subgroup")]
    NotInvariant,
    #[error("component cannot be parametrized: {0}")]
    UnparametrizableComponent(String),
    #[error("sample limits did not resolve: {0}")]
    LimitUnresolved(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
