//! Student-t distribution and the (paired) t-test used as the drift gate.
//!
//! The statistic follows the maximum-likelihood form
//! `T = sqrt(m - 1) * (mean - mu0) / sigma_ml`, where `sigma_ml` divides by
//! `m`. That is algebraically identical to the textbook
//! `(mean - mu0) / (s / sqrt(m))` with the unbiased `s`.
//!
//! The test assumes i.i.d. observations. Autocorrelated slices violate this;
//! p-values on such data are indicative only.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 10_000;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`; `y` must equal `1 - x` and is
/// passed separately so callers can supply it without cancellation.
fn regularized_beta(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * y.ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, y) / b
    }
}

/// Two-sided tail mass `P(|T| > |t|)` for `dof` degrees of freedom.
pub fn t_two_sided_p(t: f64, dof: u32) -> f64 {
    let nu = f64::from(dof);
    let t2 = t * t;
    if t2.is_infinite() {
        return 0.0;
    }
    let denom = nu + t2;
    regularized_beta(0.5 * nu, 0.5, nu / denom, t2 / denom).clamp(0.0, 1.0)
}

/// Cumulative distribution of Student's t with `dof >= 1` degrees of freedom.
pub fn t_cdf(x: f64, dof: u32) -> f64 {
    assert!(
        dof >= 1,
        "t distribution needs at least one degree of freedom"
    );
    if x.is_nan() {
        return f64::NAN;
    }
    let tail = 0.5 * t_two_sided_p(x, dof);
    if x >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Outcome of the drift gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateDecision {
    NoDrift,
    Drift,
}

impl GateDecision {
    /// `NoDrift` iff `p_value >= threshold`.
    pub fn from_p_value(p_value: f64, threshold: f64) -> Self {
        if p_value >= threshold {
            GateDecision::NoDrift
        } else {
            GateDecision::Drift
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_stat: f64,
    pub dof: u32,
    /// Two-sided.
    pub p_value: f64,
}

impl TTestResult {
    pub fn decision(&self, threshold: f64) -> GateDecision {
        GateDecision::from_p_value(self.p_value, threshold)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Maximum-likelihood (divide by `m`) standard deviation.
fn ml_std(values: &[f64], mean: f64) -> f64 {
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / values.len() as f64).sqrt()
}

/// True when the sample is constant up to rounding noise.
pub(crate) fn is_numerically_constant(values: &[f64], sigma: f64) -> bool {
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return true;
    }
    let scale = values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    sigma <= 4.0 * f64::EPSILON * scale
}

/// One-sample two-sided t-test of `H0: mean = mu0`.
pub fn one_sample_t_test(sample: &[f64], mu0: f64) -> Result<TTestResult> {
    if sample.len() < 2 {
        return Err(Error::Sizing {
            required: 2,
            actual: sample.len(),
        });
    }
    ensure_finite(sample, "t-test sample")?;
    let m = sample.len();
    let mu = mean(sample);
    let sigma = ml_std(sample, mu);
    if is_numerically_constant(sample, sigma) {
        return Err(Error::DegenerateSample);
    }
    let t_stat = ((m - 1) as f64).sqrt() * (mu - mu0) / sigma;
    let dof = (m - 1) as u32;
    Ok(TTestResult {
        t_stat,
        dof,
        p_value: t_two_sided_p(t_stat, dof),
    })
}

/// Paired t-test: one-sample test of `x[i] - y[i]` against zero.
pub fn paired_t_test(x: &[f64], y: &[f64]) -> Result<TTestResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    one_sample_t_test(&z, 0.0)
}
