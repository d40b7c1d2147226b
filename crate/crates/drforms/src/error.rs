use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("exponent denominator {0} is not one of 1, 2, 8, 24")]
    InvalidDen(u32),
    #[error("operation needs an integral exponent grid (den = 1), got den = {0}")]
    FractionalGrid(u32),
    #[error("coefficient at numerator {index} requested but series is certified only below {prec}")]
    OutOfPrecision { index: i64, prec: i64 },
    #[error("{0} is not a discriminant (must be nonzero and = 0, 1 mod 4)")]
    NotDiscriminant(i64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),
    #[error("unsupported (r, k) = ({r}, {k}): {reason}")]
    Unsupported { r: i64, k: i64, reason: String },
    #[error("support violation: {0}")]
    Support(String),
    #[error("weight parity: {0}")]
    Parity(String),
    #[error("linear algebra: {0}")]
    LinearAlgebra(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
