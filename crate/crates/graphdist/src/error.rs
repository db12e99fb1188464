//! Error type shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("asymmetric matrix: |entry ({i},{j}) - entry ({j},{i})| = {delta}")]
    Asymmetric { i: usize, j: usize, delta: f64 },

    #[error("size mismatch: graph '{id}' has {found} nodes, expected {expected}")]
    SizeMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-square matrix: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite entry at ({i},{j})")]
    NonFinite { i: usize, j: usize },

    #[error("{what} exceeds cap: {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("did not converge within {iters} iterations (residual {residual})")]
    NonConvergence { iters: usize, residual: f64 },

    #[error("singular alignment matrix cannot be inverted")]
    SingularAlignment,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("index {index} out of range for {len} graphs")]
    IndexOutOfRange { index: usize, len: usize },
}
