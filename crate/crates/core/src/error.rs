use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid upper-half-plane point: location = {location}, scale = {scale}")]
    InvalidPoint { location: f64, scale: f64 },

    #[error("matrix determinant {det} is not 1 (tolerance {tol:e})")]
    DeterminantNotOne { det: f64, tol: f64 },

    #[error("matrix determinant {0} is not positive; cannot renormalize into SL(2,R)")]
    NonPositiveDeterminant(f64),

    #[error("{name} must be {requirement}, got {value}")]
    Domain {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("horizon {horizon} must be at least {min}")]
    HorizonTooSmall { horizon: usize, min: usize },

    #[error("term sequence has {available} entries, need {required}")]
    TooFewTerms { available: usize, required: usize },

    #[error("resource cap exceeded: {requested} evaluations requested, cap is {cap}")]
    ResourceCap { requested: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(ok: bool, name: &'static str, requirement: &'static str, value: f64) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            requirement,
            value,
        })
    }
}
