//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular (pivot {pivot:e} at step {step})")]
    SingularMatrix { step: usize, pivot: f64 },
    #[error("zero pivot in incomplete factorization at row {row}")]
    ZeroPivot { row: usize },
    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),
    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("{method} did not converge after {iterations} iterations")]
    NoConvergence { method: &'static str, iterations: usize },
    #[error("every column was dropped during orthonormalization")]
    EmptyBasis,
    #[error("basis already spans the whole space; complement is empty")]
    FullSpace,
    #[error("projection matrix could not be factored: {0}")]
    SingularProjection(String),
    #[error("local block of subdomain {subdomain} is singular")]
    SingularLocalBlock { subdomain: usize },
    #[error("Krylov subspace of dimension {available} cannot supply {requested} Ritz pairs")]
    InsufficientSubspace { requested: usize, available: usize },
    #[error("selected Ritz pair {index} is complex (imaginary part {imag:e})")]
    ComplexRitzVectors { index: usize, imag: f64 },
    #[error("cos(theta) is zero; angle-based bounds are undefined")]
    AngleDegenerate,
    #[error("bound not applicable: spectrum has {0} non-real eigenvalues")]
    NotApplicable(usize),
    #[error("viscosity {value:e} at ({x}, {y}) is not positive")]
    NonPositiveViscosity { x: f64, y: f64, value: f64 },
    #[error("unsupported part count {0}; expected 16, 32, 64 or 128")]
    UnsupportedPartCount(usize),
    #[error("operator of dimension {n} exceeds the materialization limit {limit}")]
    TooLargeToMaterialize { n: usize, limit: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
