use crate::error::{ensure_finite, Error, Result};

/// `w_k = exp(-e_k) / sum_i exp(-e_i)`, evaluated after shifting by the
/// smallest error so the largest term is exactly 1.
pub fn softmax_weights(predicted_errors: &[f64]) -> Result<Vec<f64>> {
    if predicted_errors.is_empty() {
        return Err(Error::Empty("predicted errors"));
    }
    ensure_finite(predicted_errors, "predicted errors")?;
    let min = predicted_errors
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = predicted_errors
        .iter()
        .map(|e| (-(e - min)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|r| r / total).collect())
}
