use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute percentage error of a single forecast, in percent.
pub fn mape(predicted: f64, actual: f64) -> Result<f64> {
    if actual == 0.0 {
        return Err(Error::ZeroActual);
    }
    if !predicted.is_finite() || !actual.is_finite() {
        return Err(Error::NonFinite("mape arguments"));
    }
    Ok(100.0 * (predicted - actual).abs() / actual.abs())
}

/// Unit in which per-slice errors are fed to the meta-learners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorUnits {
    #[default]
    Percent,
    Fraction,
}

impl ErrorUnits {
    pub fn from_percent(self, value: f64) -> f64 {
        match self {
            ErrorUnits::Percent => value,
            ErrorUnits::Fraction => value / 100.0,
        }
    }
}
