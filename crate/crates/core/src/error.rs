use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid weight system: {0}")]
    InvalidWeights(String),

    #[error("weights collide at point {point} after the tensor transform")]
    Collision { point: usize },

    #[error("weights are not generic: they lie on a wall")]
    NonGenericWeights,

    #[error("no generic weight system found after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("value is not integral: {0}")]
    NonIntegral(String),

    #[error("coefficient of u^{i} v^{j} is not a rational integer")]
    NonIntegralCoefficient { i: u32, j: u32 },

    #[error("internal arithmetic inconsistency: {0}")]
    Inconsistent(String),

    #[error("{what} exceeds the enumeration limit ({limit})")]
    Limit { what: String, limit: u64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("torsion vector must be non-zero")]
    ZeroGamma,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
