//! Mean-matching reweighting of a historical slice towards the newest slice.
//!
//! The weights `alpha` solve
//!
//! ```text
//! minimize   (mean(alpha * source) - mean(target))^2
//! subject to floor <= alpha[j] <= B,   |mean(alpha) - 1| <= epsilon
//! ```
//!
//! by projected gradient descent started from `alpha = 1`. The Euclidean
//! projection onto the box intersected with the mean constraint is
//! `clamp(x - nu, floor, B)` for the shift `nu` that puts the mean on the
//! constraint; `nu` is found by bisection and then solved exactly on the
//! resulting active set.
//!
//! With `epsilon = 0` every weighted mean is a weighted average of the
//! source values, so the target mean is only reachable when it lies inside
//! the range spanned by `B`-bounded reweightings of the source.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::stats::{paired_t_test, GateDecision, TTestResult};

/// Lower box bound on each weight, keeps every observation alive.
pub const DEFAULT_WEIGHT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Target accuracy on the mean gap `|mean(alpha * source) - mean(target)|`.
    pub tol: f64,
    /// Slack on `|mean(alpha) - 1|`; zero gives the equality form.
    pub epsilon: f64,
    pub floor: f64,
    /// Keep the objective after every iteration in `DriftAdjustment::trace`.
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            tol: 1e-8,
            epsilon: 0.0,
            floor: DEFAULT_WEIGHT_FLOOR,
            record_trace: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be positive"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(invalid("tol", "must be finite and > 0"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon", "must be finite and >= 0"));
        }
        if !(0.0..1.0).contains(&self.floor) {
            return Err(invalid("floor", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftAdjustment {
    pub alpha: Vec<f64>,
    pub bound: f64,
    pub epsilon: f64,
    /// Squared mean gap at `alpha`.
    pub objective: f64,
    /// False when the gate let the slice through untouched.
    pub adjusted: bool,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<f64>,
}

impl DriftAdjustment {
    fn identity(source: &[f64], target_mean: f64, bound: f64, epsilon: f64) -> Self {
        let alpha = vec![1.0; source.len()];
        let objective = objective(&alpha, source, target_mean);
        Self {
            alpha,
            bound,
            epsilon,
            objective,
            adjusted: false,
            iterations: 0,
            trace: Vec::new(),
        }
    }

    pub fn weight_mean(&self) -> f64 {
        mean(&self.alpha)
    }

    /// `alpha ⊙ values`.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        self.alpha.iter().zip(values).map(|(a, v)| a * v).collect()
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn weighted_mean(alpha: &[f64], source: &[f64]) -> f64 {
    alpha.iter().zip(source).map(|(a, s)| a * s).sum::<f64>() / source.len() as f64
}

fn objective(alpha: &[f64], source: &[f64], target_mean: f64) -> f64 {
    let gap = weighted_mean(alpha, source) - target_mean;
    gap * gap
}

/// Euclidean projection of `x` onto `{floor <= a <= bound, mean(a) = level}`.
fn project_on_level(x: &[f64], floor: f64, bound: f64, level: f64, out: &mut [f64]) {
    let m = x.len() as f64;
    let mean_at = |nu: f64| x.iter().map(|v| (v - nu).clamp(floor, bound)).sum::<f64>() / m;

    let x_min = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // mean_at is non-increasing in nu: everything at `bound` on the left end,
    // everything at `floor` on the right end.
    let mut lo = x_min - bound;
    let mut hi = x_max - floor;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mean_at(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut nu = 0.5 * (lo + hi);

    // Exact shift on the active set found by bisection.
    let (mut free_sum, mut free_count, mut clamped) = (0.0, 0usize, 0.0);
    for v in x {
        let y = v - nu;
        if y <= floor {
            clamped += floor;
        } else if y >= bound {
            clamped += bound;
        } else {
            free_sum += v;
            free_count += 1;
        }
    }
    if free_count > 0 {
        let exact = (free_sum + clamped - m * level) / free_count as f64;
        if (mean_at(exact) - level).abs() <= (mean_at(nu) - level).abs() {
            nu = exact;
        }
    }
    for (o, v) in out.iter_mut().zip(x) {
        *o = (v - nu).clamp(floor, bound);
    }
}

/// Projection onto the box intersected with `|mean(a) - 1| <= epsilon`.
fn project(x: &[f64], floor: f64, bound: f64, epsilon: f64, out: &mut [f64]) {
    if epsilon > 0.0 {
        for (o, v) in out.iter_mut().zip(x) {
            *o = v.clamp(floor, bound);
        }
        let m = mean(out);
        if (1.0 - epsilon..=1.0 + epsilon).contains(&m) {
            return;
        }
        let level = if m > 1.0 {
            1.0 + epsilon
        } else {
            1.0 - epsilon
        };
        project_on_level(x, floor, bound, level, out);
    } else {
        project_on_level(x, floor, bound, 1.0, out);
    }
}

/// Finds weights that move the weighted mean of `source` onto the mean of
/// `target`. Never returns a worse objective than uniform weights.
pub fn solve_reweighting(
    source: &[f64],
    target: &[f64],
    bound: f64,
    options: &SolverOptions,
) -> Result<DriftAdjustment> {
    if source.is_empty() {
        return Err(Error::Empty("source slice"));
    }
    if target.is_empty() {
        return Err(Error::Empty("target slice"));
    }
    ensure_finite(source, "source slice")?;
    ensure_finite(target, "target slice")?;
    if !bound.is_finite() {
        return Err(Error::NonFinite("weight bound"));
    }
    if bound <= 1.0 {
        return Err(Error::InfeasibleStart { bound });
    }
    options.validate()?;

    let m = source.len() as f64;
    let target_mean = mean(target);
    let mut result = DriftAdjustment::identity(source, target_mean, bound, options.epsilon);
    result.adjusted = true;
    let start_objective = result.objective;
    if start_objective == 0.0 {
        return Ok(result);
    }

    let source_mean = mean(source);
    let centered_sq: f64 = source.iter().map(|s| (s - source_mean).powi(2)).sum();
    let scale = source.iter().fold(0.0_f64, |acc, s| acc.max(s.abs()));
    if centered_sq.sqrt() <= 4.0 * f64::EPSILON * scale * m.sqrt() {
        // constant source: every feasible alpha gives the same weighted mean
        return Ok(result);
    }

    // Inverse curvature of the objective along the constraint surface; one
    // unconstrained step of this size closes the gap exactly.
    let base_step = m * m / (2.0 * centered_sq);

    let mut alpha = result.alpha.clone();
    let mut f = start_objective;
    let mut candidate = vec![0.0; source.len()];
    let mut shifted = vec![0.0; source.len()];
    let mut iterations = 0;
    let mut trace = Vec::new();

    let mut step = base_step;
    while iterations < options.max_iters && f.sqrt() > options.tol {
        iterations += 1;
        let gap = weighted_mean(&alpha, source) - target_mean;
        let coef = 2.0 * gap / m; // gradient = coef * source
                                  // Grow from the last accepted step: once weights pin at the box the
                                  // curvature along the remaining free face can be far smaller.
        step = (step * 4.0).max(base_step);
        let mut accepted = None;
        for _ in 0..200 {
            for ((s, a), g) in shifted.iter_mut().zip(&alpha).zip(source) {
                *s = a - step * coef * g;
            }
            project(
                &shifted,
                options.floor,
                bound,
                options.epsilon,
                &mut candidate,
            );
            let f_new = objective(&candidate, source, target_mean);
            let (mut lin, mut sq) = (0.0, 0.0);
            for ((c, a), g) in candidate.iter().zip(&alpha).zip(source) {
                let d = c - a;
                lin += coef * g * d;
                sq += d * d;
            }
            if f_new <= f + lin + sq / (2.0 * step) + 1e-15 * f {
                accepted = Some((f_new, sq.sqrt()));
                break;
            }
            step *= 0.5;
        }
        let Some((f_new, moved)) = accepted else {
            break;
        };
        if f_new > f {
            // rounding-level stall
            break;
        }
        debug_assert!(f_new <= f);
        alpha.copy_from_slice(&candidate);
        f = f_new;
        if options.record_trace {
            trace.push(f);
        }
        if moved <= 1e-13 * m.sqrt() {
            break;
        }
    }

    if f <= start_objective {
        result.alpha = alpha;
        result.objective = objective(&result.alpha, source, target_mean);
    }
    result.iterations = iterations;
    result.trace = trace;
    Ok(result)
}

/// Right-hand sides of the concentration bounds for a reweighting with
/// weights in `[0, B]` over `n` samples with `|x| <= R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `(1 + sqrt(ln(2/delta))) * R * sqrt((B^2 + 1) / n)`
    pub residual_bound: f64,
    /// `B * sqrt(ln(2/delta) / (2n))`
    pub weight_mean_bound: f64,
    /// `B / (2 sqrt(n))`
    pub weight_mean_std_bound: f64,
    pub r: f64,
    pub delta: f64,
    pub bound: f64,
    pub n: usize,
}

pub fn concentration_bounds(bound: f64, r: f64, n: usize, delta: f64) -> Result<BoundReport> {
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(invalid("bound", "must be finite and > 0"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("r", "must be finite and > 0"));
    }
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "must lie in (0, 1)"));
    }
    let log_term = (2.0 / delta).ln();
    let nf = n as f64;
    Ok(BoundReport {
        residual_bound: (1.0 + log_term.sqrt()) * r * ((bound * bound + 1.0) / nf).sqrt(),
        weight_mean_bound: bound * (log_term / (2.0 * nf)).sqrt(),
        weight_mean_std_bound: bound / (2.0 * nf.sqrt()),
        r,
        delta,
        bound,
        n,
    })
}

/// How the drift gate reached its decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateTest {
    Tested(TTestResult),
    /// Differences were constant, so the t-test is undefined.
    ConstantDifference {
        difference: f64,
    },
}

impl GateTest {
    /// Constant non-zero differences count as certain drift (p = 0), identical
    /// slices as certain agreement (p = 1).
    pub fn p_value(&self) -> f64 {
        match self {
            GateTest::Tested(r) => r.p_value,
            GateTest::ConstantDifference { difference } => {
                if *difference == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn t_stat(&self) -> Option<f64> {
        match self {
            GateTest::Tested(r) => Some(r.t_stat),
            GateTest::ConstantDifference { .. } => None,
        }
    }

    pub fn decision(&self, threshold: f64) -> GateDecision {
        GateDecision::from_p_value(self.p_value(), threshold)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedSlice {
    pub values: Vec<f64>,
    pub adjustment: DriftAdjustment,
    pub gate: GateTest,
}

/// Paired-t-test gate followed, on drift, by reweighting towards `newest`.
pub fn adjust_slice(
    values: &[f64],
    newest: &[f64],
    p_threshold: f64,
    bound: f64,
    options: &SolverOptions,
) -> Result<AdjustedSlice> {
    if values.len() != newest.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: newest.len(),
        });
    }
    if !(0.0..=1.0).contains(&p_threshold) {
        return Err(invalid("p_threshold", "must lie in [0, 1]"));
    }
    let gate = match paired_t_test(values, newest) {
        Ok(r) => GateTest::Tested(r),
        Err(Error::DegenerateSample) => {
            let diff =
                values.iter().zip(newest).map(|(a, b)| a - b).sum::<f64>() / values.len() as f64;
            let all_zero = values.iter().zip(newest).all(|(a, b)| a == b);
            GateTest::ConstantDifference {
                difference: if all_zero { 0.0 } else { diff },
            }
        }
        Err(e) => return Err(e),
    };
    match gate.decision(p_threshold) {
        GateDecision::NoDrift => {
            if bound <= 1.0 {
                return Err(Error::InfeasibleStart { bound });
            }
            Ok(AdjustedSlice {
                values: values.to_vec(),
                adjustment: DriftAdjustment::identity(values, mean(newest), bound, options.epsilon),
                gate,
            })
        }
        GateDecision::Drift => {
            let adjustment = solve_reweighting(values, newest, bound, options)?;
            Ok(AdjustedSlice {
                values: adjustment.apply(values),
                adjustment,
                gate,
            })
        }
    }
}
