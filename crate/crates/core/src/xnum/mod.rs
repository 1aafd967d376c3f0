//! Extended-exponent arithmetic.
//!
//! A value is `sign * significand * 2^exponent` with `sign ∈ {-1, 0, +1}`,
//! `significand ∈ [1, 2)` stored as an `f64`, and a signed 64-bit exponent.
//! This keeps ~15.9 significant digits over a dynamic range of roughly
//! `2^(±4.6e18)`, which is what the fast-growing scale ladder needs (the
//! sixth scale is already ~`10^643` at `C = 2000`, and preimage-tree
//! derivative products overshoot `f64` range by thousands of binary orders).
//!
//! Addition uses a sticky cutoff: when the operands' exponents differ by more
//! than 64, the smaller operand is dropped and the larger returned exactly.
//! The relative error of that drop (< 2^-64) is below one `f64` ulp, so the
//! usual ~1-ulp-per-operation error accounting still covers it.

mod complex;
mod real;

pub use complex::XComplex;
pub use real::{XReal, EXP_LIMIT};

use thiserror::Error;

/// Errors from extended-exponent operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XError {
    /// Input outside an operation's domain (non-finite significand,
    /// logarithm of a non-positive value, division by zero, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Exponent left the representable range `|exponent| < 2^62`.
    #[error("exponent {0} out of range (|exponent| must be < 2^62)")]
    Range(i128),
}

pub type XResult<T> = Result<T, XError>;
