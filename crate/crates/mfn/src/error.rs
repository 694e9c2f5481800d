//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors reported by interpolation, poisedness, and solver routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A point or vector does not have the expected dimension.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The requested number of interpolation points is outside the
    /// supported interval `[n + 2, 2n + 1]`.
    #[error("invalid point count m = {m}: must lie in [{min}, {max}] for dimension n = {n}")]
    PointCountOutOfRange {
        m: usize,
        n: usize,
        min: usize,
        max: usize,
    },

    /// Fewer than `n + 2` points: the minimum Frobenius norm problem
    /// carries no second-order information.
    #[error("too few interpolation points: m = {m} but at least n + 2 = {needed} are required")]
    TooFewPoints { m: usize, needed: usize },

    /// The interpolation set is not poised (the saddle-point system is
    /// singular or its condition estimate exceeds the threshold).
    #[error("interpolation set is not poised (condition estimate {condition:e})")]
    NotPoised { condition: f64 },

    /// The solved model violates the interpolation conditions beyond the
    /// residual tolerance, which signals ill-conditioning.
    #[error("interpolation residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualViolation { residual: f64, tolerance: f64 },

    /// An index into the interpolation set is out of range.
    #[error("index {index} out of range for a set of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    /// The ball center is not one of the interpolation points.
    #[error("the ball center is not a point of the interpolation set")]
    CenterNotInSet,

    /// A radius, exponent, or option value is invalid.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Unknown test-function name.
    #[error("unknown test function {name:?} (expected sphere, quadratic-crossterms, rosenbrock, or linear)")]
    UnknownFunction { name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
