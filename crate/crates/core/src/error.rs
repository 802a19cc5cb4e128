use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, got n = {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("resource cap exceeded: {what} = {requested} > {cap}")]
    ResourceCap { what: &'static str, requested: usize, cap: usize },

    #[error("weight matrix is not positive definite (smallest eigenvalue {smallest_eigenvalue:e})")]
    WeightNotPositive { smallest_eigenvalue: f64 },

    #[error("Q-data is not orthogonal to Ker P: obstruction norm {obstruction_norm:e}")]
    NotSolvable { obstruction_norm: f64 },

    #[error("ill-conditioned partial inverse (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
