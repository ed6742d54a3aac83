use thiserror::Error;

/// Errors raised by the reconstruction toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration bounds [{a}, {b}] are not an ordered sub-interval of [0, 1]")]
    InvalidBounds { a: f64, b: f64 },

    #[error("grid mismatch: expected N = {expected}, found N = {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point {0} lies outside [0, 1]")]
    OutOfDomain(f64),

    #[error("matrix is singular or numerically singular (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("system is ill-conditioned: condition estimate {condition:e} exceeds {threshold:e}")]
    IllConditioned { condition: f64, threshold: f64 },

    #[error("constraint is infeasible: {0}")]
    Infeasible(String),

    #[error("iteration diverged after {iterations} steps (sup norm grew to {norm:e})")]
    Diverged { iterations: usize, norm: f64 },

    #[error("boundary value problem has no Dirichlet segment; the pure Neumann problem is singular")]
    NoDirichletSegment,

    #[error("linear solve did not reach tolerance: residual {residual:e}")]
    NotConverged { residual: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
