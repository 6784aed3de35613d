//! Base forecasters.
//!
//! Four deliberately different models share one contract: fit on a run of
//! observations, then produce a one-step forecast that is iterated
//! recursively for longer horizons. Other models plug in through the
//! [`Forecaster`] trait.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};

pub const DEFAULT_AR_RIDGE: f64 = 1e-6;

fn default_ridge() -> f64 {
    DEFAULT_AR_RIDGE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForecasterKind {
    /// Arithmetic mean of the training data.
    Mean,
    /// Repeats the last `period` observations.
    SeasonalNaive { period: usize },
    /// Simple exponential smoothing with constant `alpha` in (0, 1].
    ExpSmoothing { alpha: f64 },
    /// AR(p) with intercept, ridge-regularised least squares.
    AutoRegressive {
        p: usize,
        #[serde(default = "default_ridge")]
        ridge: f64,
    },
}

impl fmt::Display for ForecasterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForecasterKind::Mean => write!(f, "mean"),
            ForecasterKind::SeasonalNaive { period } => write!(f, "seasonal_naive({period})"),
            ForecasterKind::ExpSmoothing { alpha } => write!(f, "exp_smoothing({alpha})"),
            ForecasterKind::AutoRegressive { p, ridge } => write!(f, "ar({p}, ridge={ridge})"),
        }
    }
}

impl ForecasterKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ForecasterKind::Mean => Ok(()),
            ForecasterKind::SeasonalNaive { period: 0 } => {
                Err(invalid("period", "must be at least 1"))
            }
            ForecasterKind::SeasonalNaive { .. } => Ok(()),
            ForecasterKind::ExpSmoothing { alpha } if !(alpha > 0.0 && alpha <= 1.0) => {
                Err(invalid("alpha", "smoothing constant must lie in (0, 1]"))
            }
            ForecasterKind::ExpSmoothing { .. } => Ok(()),
            ForecasterKind::AutoRegressive { p: 0, .. } => {
                Err(invalid("p", "AR order must be at least 1"))
            }
            ForecasterKind::AutoRegressive { ridge, .. }
                if !(ridge >= 0.0 && ridge.is_finite()) =>
            {
                Err(invalid("ridge", "must be finite and >= 0"))
            }
            ForecasterKind::AutoRegressive { .. } => Ok(()),
        }
    }

    /// Smallest training run the model accepts.
    pub fn min_len(&self) -> usize {
        match *self {
            ForecasterKind::Mean | ForecasterKind::ExpSmoothing { .. } => 1,
            ForecasterKind::SeasonalNaive { period } => period,
            ForecasterKind::AutoRegressive { p, .. } => p + 2,
        }
    }

    pub fn fit(&self, data: &[f64]) -> Result<FittedForecaster> {
        fit(*self, data)
    }
}

/// Fitted state of one of the built-in models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedState {
    Mean {
        mean: f64,
    },
    SeasonalNaive {
        tail: Vec<f64>,
    },
    ExpSmoothing {
        level: f64,
    },
    AutoRegressive {
        intercept: f64,
        /// `coefficients[i]` multiplies lag `i + 1`.
        coefficients: Vec<f64>,
        /// Last `p` observations, oldest first.
        history: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedForecaster {
    pub kind: ForecasterKind,
    pub state: FittedState,
    pub trained_len: usize,
}

impl FittedForecaster {
    /// Recursive multi-step forecast; step 1 is the one-point forecast.
    pub fn forecast(&self, steps: usize) -> Vec<f64> {
        match &self.state {
            FittedState::Mean { mean } => vec![*mean; steps],
            FittedState::SeasonalNaive { tail } => {
                (0..steps).map(|h| tail[h % tail.len()]).collect()
            }
            FittedState::ExpSmoothing { level } => vec![*level; steps],
            FittedState::AutoRegressive {
                intercept,
                coefficients,
                history,
            } => {
                let mut window = history.clone();
                let mut out = Vec::with_capacity(steps);
                for _ in 0..steps {
                    let next = intercept
                        + coefficients
                            .iter()
                            .zip(window.iter().rev())
                            .map(|(c, x)| c * x)
                            .sum::<f64>();
                    out.push(next);
                    window.remove(0);
                    window.push(next);
                }
                out
            }
        }
    }

    pub fn one_step(&self) -> f64 {
        self.forecast(1)[0]
    }
}

pub fn fit(kind: ForecasterKind, data: &[f64]) -> Result<FittedForecaster> {
    kind.validate()?;
    ensure_finite(data, "training data")?;
    let required = kind.min_len();
    if data.len() < required {
        return Err(Error::Sizing {
            required,
            actual: data.len(),
        });
    }
    let state = match kind {
        ForecasterKind::Mean => FittedState::Mean {
            mean: data.iter().sum::<f64>() / data.len() as f64,
        },
        ForecasterKind::SeasonalNaive { period } => FittedState::SeasonalNaive {
            tail: data[data.len() - period..].to_vec(),
        },
        ForecasterKind::ExpSmoothing { alpha } => {
            let level = data[1..]
                .iter()
                .fold(data[0], |s, &x| alpha * x + (1.0 - alpha) * s);
            FittedState::ExpSmoothing { level }
        }
        ForecasterKind::AutoRegressive { p, ridge } => fit_autoregressive(data, p, ridge, &kind)?,
    };
    Ok(FittedForecaster {
        kind,
        state,
        trained_len: data.len(),
    })
}

/// Least squares for `x_t = c + sum_i phi_i x_{t-i}` via the normal equations
/// with `ridge` on the lag coefficients only (the intercept is unpenalised,
/// which keeps the fit shift-equivariant). Data are centred first for
/// conditioning.
fn fit_autoregressive(
    data: &[f64],
    p: usize,
    ridge: f64,
    kind: &ForecasterKind,
) -> Result<FittedState> {
    let n = data.len();
    let center = data.iter().sum::<f64>() / n as f64;
    let y: Vec<f64> = data.iter().map(|v| v - center).collect();
    let dim = p + 1;
    let mut gram = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];
    let mut row = vec![0.0; dim];
    for t in p..n {
        row[0] = 1.0;
        for i in 1..=p {
            row[i] = y[t - i];
        }
        for a in 0..dim {
            rhs[a] += row[a] * y[t];
            for b in 0..dim {
                gram[a * dim + b] += row[a] * row[b];
            }
        }
    }
    for i in 1..dim {
        gram[i * dim + i] += ridge;
    }
    let beta = solve_linear(&mut gram, &mut rhs, dim).ok_or_else(|| Error::SingularFit {
        model: kind.to_string(),
    })?;
    let coefficients = beta[1..].to_vec();
    let phi_sum: f64 = coefficients.iter().sum();
    let intercept = beta[0] + center * (1.0 - phi_sum);
    if !intercept.is_finite() || coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::SingularFit {
            model: kind.to_string(),
        });
    }
    Ok(FittedState::AutoRegressive {
        intercept,
        coefficients,
        history: data[n - p..].to_vec(),
    })
}

/// Gaussian elimination with partial pivoting; `None` when the matrix is
/// numerically singular.
fn solve_linear(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    let norm = a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let tiny = norm * n as f64 * 1e-13;
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[pivot * n + col].abs() <= tiny || a[pivot * n + col] == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        for r in col + 1..n {
            let factor = a[r * n + col] / a[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for k in r + 1..n {
            acc -= a[r * n + k] * x[k];
        }
        x[r] = acc / a[r * n + r];
    }
    Some(x)
}

/// Anything that can be trained on a run of observations and forecast ahead.
pub trait Forecaster: Send + Sync {
    fn label(&self) -> String;

    /// Minimum training length.
    fn min_len(&self) -> usize;

    fn fit_forecast(&self, data: &[f64], steps: usize) -> Result<Vec<f64>>;
}

impl Forecaster for ForecasterKind {
    fn label(&self) -> String {
        self.to_string()
    }

    fn min_len(&self) -> usize {
        ForecasterKind::min_len(self)
    }

    fn fit_forecast(&self, data: &[f64], steps: usize) -> Result<Vec<f64>> {
        if steps == 0 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        Ok(self.fit(data)?.forecast(steps))
    }
}
