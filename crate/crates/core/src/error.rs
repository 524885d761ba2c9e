use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("{0} is not a root of the drift")]
    NotARoot(String),
    #[error("point {0} is not on the boundary {{0, 1}}")]
    NotBoundary(String),
    #[error("invalid replacement matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid urn state: {0}")]
    InvalidState(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("sample set is empty")]
    EmptySamples,
    #[error("parameter must be positive, got {0}")]
    NonPositiveParameter(String),
    #[error("candidate points {0} and {1} are within twice the clustering radius")]
    OverlappingCandidates(f64, f64),
}

pub type Result<T> = std::result::Result<T, Error>;
