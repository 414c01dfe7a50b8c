use thiserror::Error;

/// Errors raised across the toolkit.
///
/// `Degenerate` is special: it marks inputs that are valid but not in general
/// position, and callers working with seeded-random instances treat it as a
/// resample trigger rather than a hard failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable count mismatch: {0} vs {1}")]
    NvarsMismatch(usize, usize),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("ring side mismatch")]
    SideMismatch,
    #[error("form is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("system is not zero-dimensional")]
    NotZeroDimensional,
    #[error("coefficient blowup over the rationals (max {0} bits); retry over a prime field")]
    CoefficientBlowup(u64),
    #[error("numerical rank is indeterminate: singular value {value:e} within 10x of threshold {threshold:e}")]
    Indeterminate { value: f64, threshold: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::Degenerate(_) | Error::Numerical(_) | Error::Indeterminate { .. })
    }
}
