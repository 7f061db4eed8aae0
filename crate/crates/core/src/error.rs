use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: String, reason: String },
    #[error("invalid time {0}: must be finite and >= 0")]
    InvalidTime(f64),
    #[error("invalid integration step {0}: must be finite and > 0")]
    InvalidStep(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid device precision {0}: must be >= 1e-12")]
    InvalidPrecision(f64),
    #[error("invalid mass mixture: {0}")]
    InvalidMixture(String),
    #[error("no elapsed time: time-energy denominator is zero")]
    NoElapsedTime,
    #[error("invalid oracle configuration: {0}")]
    Config(String),
    #[error("invalid sweep range: {0}")]
    Range(String),
}

impl Error {
    pub(crate) fn invalid_param(field: &str, reason: &str) -> Self {
        Error::InvalidParam {
            field: field.to_owned(),
            reason: reason.to_owned(),
        }
    }
}
