use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("radius {r} too small, need r >= {min_r} and r > 0")]
    RadiusTooSmall { r: f64, min_r: f64 },
    #[error("map is not an isometric field embedding: {0}")]
    NotIsometric(String),
    #[error("transport problem infeasible: {0}")]
    Infeasible(String),
    #[error("coupling marginals do not match: {0}")]
    MarginalMismatch(String),
    #[error("weights required")]
    MissingWeights,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("target space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
