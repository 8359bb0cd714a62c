//! Error type shared by the whole crate.

use std::fmt;

use thiserror::Error;

/// Which analytic tail of a radial function caused a divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// The tail on small spheres, `k -> -inf`.
    Inner,
    /// The tail on large spheres, `k -> +inf`.
    Outer,
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::Inner => write!(f, "inner"),
            Tail::Outer => write!(f, "outer"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor rejected its arguments (non-prime `p`, `alpha` out of
    /// range, `q < 1`, `lambda` outside `[-1/q, 0)`, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A vector had the wrong number of coordinates.
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A function and an operator were built over different `(p, n)`.
    #[error("ambient parameter mismatch: function has (p, n) = ({f_p}, {f_n}), operator has ({o_p}, {o_n})")]
    ParamMismatch { f_p: u32, f_n: u32, o_p: u32, o_n: u32 },

    /// An arithmetic operation left its domain (negative base under a
    /// fractional exponent, `0^0`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A geometric series with ratio outside `(0, 1)`.
    #[error("series diverges: common ratio {ratio} is not in (0, 1)")]
    DivergentSeries { ratio: String },

    /// A norm integral or superlevel measure is infinite; names the tail.
    #[error("{tail} tail diverges: {detail}")]
    DivergentNorm { tail: Tail, detail: String },

    /// A function spec file could not be parsed or violates the invariants.
    #[error("malformed function spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
