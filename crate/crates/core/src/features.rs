//! Quantile embedding of a slice.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Result};

/// The `k + 1` quantiles `q[j]` at probabilities `j / k`, `j = 0..=k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileFeatures {
    pub k: usize,
    pub q: Vec<f64>,
}

impl QuantileFeatures {
    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }
}

/// Linear-interpolation quantile of already sorted values at probability `p`,
/// using position `(m - 1) * p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let m = sorted.len();
    debug_assert!(m > 0);
    let pos = (m - 1) as f64 * p;
    interpolate(sorted, pos)
}

fn interpolate(sorted: &[f64], pos: f64) -> f64 {
    let lo = pos.floor() as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = pos - lo as f64;
    if frac == 0.0 {
        return sorted[lo];
    }
    let (a, b) = (sorted[lo], sorted[lo + 1]);
    (a + frac * (b - a)).clamp(a, b)
}

/// Quantile features of a slice's values.
///
/// Requires at least two values and `k >= 1`.
pub fn quantile_features(values: &[f64], k: usize) -> Result<QuantileFeatures> {
    if values.len() < 2 {
        return Err(invalid(
            "slice_len",
            "quantile features need at least 2 values",
        ));
    }
    if k == 0 {
        return Err(invalid("quantiles", "k must be at least 1"));
    }
    ensure_finite(values, "slice")?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let span = sorted.len() - 1;
    let q = (0..=k)
        .map(|j| {
            // integer numerator keeps the endpoints exact
            let pos = (span * j) as f64 / k as f64;
            interpolate(&sorted, pos)
        })
        .collect();
    Ok(QuantileFeatures { k, q })
}
