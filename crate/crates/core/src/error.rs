use thiserror::Error;

use crate::point::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("zero functional where a nonzero functional is required")]
    ZeroFunctional,

    #[error("norm or gauge is not differentiable here (one-sided derivatives differ by {gap:.3e} along coordinate {coordinate})")]
    NotSmooth { coordinate: usize, gap: f64 },

    #[error("point is not on the boundary (gauge = {gauge})")]
    NotOnBoundary { gauge: f64 },

    #[error("no smooth boundary point among {tried} sampled directions")]
    NoSmoothPoints { tried: usize },

    #[error("invalid exponent p = {0}; need p >= 1")]
    InvalidExponent(f64),

    #[error("invalid base space: {0}")]
    InvalidBaseSpace(String),

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("origin is not an interior point of the body")]
    OriginNotInterior,

    #[error("intersection of half-spaces is unbounded")]
    Unbounded,

    #[error("degenerate body: scaling by zero collapses the body to the origin")]
    DegenerateBody,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty list")]
    EmptyList,

    #[error("weights do not match: {0}")]
    WeightMismatch(String),

    #[error("projection invariant violated: {0}")]
    InvalidProjection(String),

    #[error("selection does not map into the half-space: f(Px) = {value:.3e} > 0")]
    SelectionInvalid { value: f64 },

    #[error("no norm-one projection found; best operator-norm estimate {estimate}")]
    NotFound { estimate: f64 },

    #[error("iteration did not converge in {iterations} steps (residual {residual:.3e})")]
    MaxIterExceeded {
        point: Point,
        iterations: usize,
        residual: f64,
    },

    #[error("no counterexample witness found after {queries} queries (best certified margin {best_margin:.3e})")]
    SearchExhausted { queries: usize, best_margin: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
