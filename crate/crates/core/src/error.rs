use thiserror::Error;

/// Errors produced by the forecasting engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series too short: need at least {required} observations, got {actual}")]
    Sizing { required: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("input `{0}` is empty")]
    Empty(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate sample: standard deviation is zero, t-test undefined")]
    DegenerateSample,

    #[error("percentage error undefined for an actual value of zero")]
    ZeroActual,

    #[error("singular normal equations for {model}; use a ridge penalty > 0")]
    SingularFit { model: String },

    #[error("weight bound B = {bound} must exceed 1 so that uniform weights are feasible")]
    InfeasibleStart { bound: f64 },

    #[error("feature dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
