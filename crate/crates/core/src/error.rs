// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must have at least one row")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("matrix exponential scaling failed: {0}")]
    Scaling(String),

    #[error("no strict solution: eigenvalue {eigenvalue} lies within {margin:e} of the stability boundary")]
    UnsolvableOnBoundary { eigenvalue: Complex64, margin: f64 },

    #[error("matrix is not unit upper triangular (entry ({row}, {col}) = {value})")]
    NotUnitTriangular { row: usize, col: usize, value: Complex64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular point z = {z}: condition estimate {condition:e}")]
    SingularPoint { z: Complex64, condition: f64 },

    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid family spec: {0}")]
    Spec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit status: 2 for input, parse and configuration errors, 3 for
    /// numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotSquare { .. }
            | Error::Empty
            | Error::NonFinite { .. }
            | Error::Dimension { .. }
            | Error::Parse { .. }
            | Error::Spec(_)
            | Error::Config(_) => 2,
            Error::Factorization(_)
            | Error::Scaling(_)
            | Error::UnsolvableOnBoundary { .. }
            | Error::NotUnitTriangular { .. }
            | Error::Domain(_)
            | Error::SingularPoint { .. } => 3,
            Error::Io(_) => 4,
        }
    }
}
