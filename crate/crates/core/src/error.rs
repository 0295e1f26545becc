use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("permutation table {index} is not a bijection")]
    NotABijection { index: usize },

    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("{what} = {value} is out of range (valid: {range})")]
    IndexOutOfRange {
        what: &'static str,
        value: usize,
        range: String,
    },

    #[error("non-zero rank k = {0} must be 1 or 2")]
    BadK(usize),

    #[error("dimension {dim} exceeds the dense cap {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("matrix is numerically singular (smallest singular value {0:e})")]
    SingularMatrix(f64),

    #[error("eps = {0} must lie in (0, 1)")]
    BadEps(f64),

    #[error("operator norm {0} exceeds 1")]
    NormTooLarge(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("kappa = {0} is below 4")]
    BadKappa(f64),

    #[error("schema error in {path}: {msg}")]
    Schema { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
