//! Error type shared by every module of the lab.

use thiserror::Error;

use crate::eisenstein::EisInt;

/// Errors raised by the arithmetic, analytic and harness layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// An operation received `0` where a nonzero element is required.
    #[error("zero input")]
    ZeroInput,
    /// Both arguments of a gcd were zero.
    #[error("gcd of two zeros is undefined")]
    BothZero,
    /// Euclidean division by zero.
    #[error("division by zero")]
    DivisionByZero,
    /// The element is divisible by `λ` and has no primary associate.
    #[error("{0} is divisible by λ")]
    DivisibleByLambda(EisInt),
    /// A rational integer expected to be prime is composite.
    #[error("{0} is not a rational prime")]
    NotPrime(u64),
    /// An argument expected to be a primary prime is not.
    #[error("{0} is not a primary prime")]
    NotPrimaryPrime(EisInt),
    /// A split prime was demanded but an inert one was given.
    #[error("{0} does not lie over a split rational prime")]
    NotSplit(EisInt),
    /// A symbol modulus was not `≡ 1 (mod 3)`.
    #[error("modulus {0} is not ≡ 1 (mod 3)")]
    BadModulus(EisInt),
    /// A direct evaluation would exceed its configured norm cap.
    #[error("norm {norm} exceeds the direct-evaluation cap {cap}")]
    CapExceeded {
        /// Norm requested.
        norm: i64,
        /// Configured cap.
        cap: i64,
    },
    /// The element is not a member of the family required by the operation.
    #[error("{0} is not a member of the family")]
    NotInFamily(EisInt),
    /// A point outside the critical strip was requested.
    #[error("Re(s) = {0} lies outside the critical strip [0, 1]")]
    OutOfStrip(f64),
    /// A Dirichlet series was evaluated in its region of divergence.
    #[error("argument {0} is outside the region of convergence")]
    DivergentArgument(f64),
    /// A quadrature failed to stabilise within its refinement budget.
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    /// A local factor was requested at the ramified prime.
    #[error("local factor requested at the ramified prime")]
    RamifiedPrime,
    /// The mollifier length exponent is outside `(0, 1/6]`.
    #[error("theta = {0} is outside (0, 1/6]")]
    ThetaOutOfRange(f64),
    /// Cached data were produced under a different configuration.
    #[error("cache mismatch: {0}")]
    CacheMismatch(String),
    /// Malformed input data (configuration, cache or CSV).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Filesystem failure.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

/// Result alias used across the crate.
pub type LabResult<T> = Result<T, LabError>;
