use alloc::string::String;

/// Failure modes of the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("shrinking by {eps} leaves an empty domain")]
    EmptyDomain { eps: f64 },

    #[error("point ({x}, {y}) lies outside the closed domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("support of {what} is not strictly inside the domain (margin {margin})")]
    SupportViolation { what: &'static str, margin: f64 },

    #[error("trajectory left the domain by {excess} at t = {time}")]
    IntegrationBlowup { excess: f64, time: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
