//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong, split between input validation and
/// numerical guards. The distinction matters to the CLI, which maps the
/// two classes to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invalid function values: {0}")]
    InvalidValues(String),
    #[error("boxes overlap: {0}")]
    BoxOverlap(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partitions not aligned: {0}")]
    NotAligned(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("spectral function undefined: {0}")]
    UndefinedSpectralValue(String),

    // Numerical guards: the input was well-formed but a run-time check on
    // the computation itself failed.
    #[error("aliasing guard tripped: {0}")]
    Aliasing(String),
    #[error("truncation guard tripped: {0}")]
    Truncation(String),
    #[error("window has no mass on the overlap: {0}")]
    WindowOverlap(String),
    #[error("divergent tail: {0}")]
    DivergentTail(String),
    #[error("eigenvalue solver did not converge: {0}")]
    NonConvergence(String),
    #[error("numerical check failed: {0}")]
    NumericalCheck(String),
}

impl Error {
    /// True for guards that fire on numerically suspect computations, as
    /// opposed to malformed inputs.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::Aliasing(_)
                | Error::Truncation(_)
                | Error::WindowOverlap(_)
                | Error::DivergentTail(_)
                | Error::NonConvergence(_)
                | Error::NumericalCheck(_)
        )
    }
}
