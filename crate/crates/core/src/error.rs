use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("order {order} squared does not divide {n}")]
    OrderSquareNotDividing { order: u64, n: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("multiplier must be at least {min}, got {got}")]
    MultiplierTooSmall { min: u64, got: u64 },

    #[error("grid denominator must lie in 1..=20, got {0}")]
    GridOutOfRange(u64),

    #[error("{what} must be positive, got {value}")]
    NotPositive { what: &'static str, value: String },

    #[error("invalid index range: n_min = {n_min}, n_max = {n_max}")]
    InvalidRange { n_min: u64, n_max: u64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("parse error: {0}")]
    Parse(String),
}
