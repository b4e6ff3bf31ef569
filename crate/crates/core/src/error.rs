//! Error type shared across the crate.
//!
//! Operations that return `Result` validate their inputs and report one of
//! these variants; infallible closed-form evaluations (`f_plus`, `h_lo`, ...)
//! instead assert their numeric preconditions.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid dimension: {what} needs at least {min}, got {got}")]
    InvalidDimension {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("dimension mismatch: {what} ({left} vs {right})")]
    DimensionMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    /// Gram-Schmidt hit a numerically dependent column.
    #[error(
        "degenerate input: column {column} has projected norm {norm:.3e}, \
         below rank tolerance {tol:.0e}"
    )]
    DegenerateInput { column: usize, norm: f64, tol: f64 },

    #[error("not unitary: max |U\u{2020}U - I| = {deviation:.3e} exceeds tolerance {tol:.0e}")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    /// A Cholesky factorization failed where a covariance (block) was needed.
    #[error("{what} is not positive definite")]
    NotPositiveDefinite { what: &'static str },

    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("mode index {index} out of range for {modes} modes")]
    ModeIndex { index: usize, modes: usize },

    #[error("need at least {min} {what}, got {got}")]
    TooFew {
        what: &'static str,
        min: usize,
        got: usize,
    },
}
