use serde::{Deserialize, Serialize};

use crate::drift::SolverOptions;
use crate::error::{invalid, Result};
use crate::forecast::{ForecasterKind, DEFAULT_AR_RIDGE};
use crate::metrics::ErrorUnits;

/// Which values feed the quantile features of a drift-adjusted slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSource {
    /// The reweighted values the forecasters were trained on.
    #[default]
    Adjusted,
    /// The raw slice values (ablation).
    Raw,
}

/// What a forecaster trained on a reweighted slice is scored against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActualReference {
    /// The observed next value.
    #[default]
    Original,
    /// The next value scaled by `mean(alpha * x) / mean(x)`, the level change
    /// the reweighting applied to the slice.
    Rescaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: 3,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            max_iters: d.max_iters,
            tol: d.tol,
        }
    }
}

pub fn default_forecasters() -> Vec<ForecasterKind> {
    vec![
        ForecasterKind::Mean,
        ForecasterKind::SeasonalNaive { period: 7 },
        ForecasterKind::ExpSmoothing { alpha: 0.3 },
        ForecasterKind::AutoRegressive {
            p: 2,
            ridge: DEFAULT_AR_RIDGE,
        },
    ]
}

/// Everything the ensemble pipeline needs besides the series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Slice length `L`.
    pub slice_len: usize,
    /// Number of slices `n`.
    pub slice_count: usize,
    /// Quantile count `k`; features have `k + 1` entries.
    pub quantiles: usize,
    /// Slices with paired-t p-value at or above this are left unadjusted.
    pub p_threshold: f64,
    /// Upper bound `B` on each weight.
    pub bound: f64,
    pub epsilon: f64,
    pub horizon: usize,
    pub forecasters: Vec<ForecasterKind>,
    pub tree: TreeConfig,
    pub solver: SolverConfig,
    /// Confidence parameter of the reported concentration bounds.
    pub delta: f64,
    pub feature_source: FeatureSource,
    pub error_units: ErrorUnits,
    pub actual_reference: ActualReference,
    /// Recorded for provenance; every pipeline step is deterministic.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            slice_len: 20,
            slice_count: 6,
            quantiles: 4,
            p_threshold: 0.5,
            bound: 5.0,
            epsilon: 0.0,
            horizon: 1,
            forecasters: default_forecasters(),
            tree: TreeConfig::default(),
            solver: SolverConfig::default(),
            delta: 0.05,
            feature_source: FeatureSource::default(),
            error_units: ErrorUnits::default(),
            actual_reference: ActualReference::default(),
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slice_len < 2 {
            return Err(invalid("slice_len", "must be at least 2"));
        }
        if self.slice_count < 2 {
            return Err(invalid(
                "slice_count",
                "need at least 2 slices (history + newest)",
            ));
        }
        if self.quantiles == 0 {
            return Err(invalid("quantiles", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p_threshold) {
            return Err(invalid("p_threshold", "must lie in [0, 1]"));
        }
        if !(self.bound > 1.0 && self.bound.is_finite()) {
            return Err(invalid("bound", "must be finite and > 1"));
        }
        if self.horizon == 0 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        if self.forecasters.is_empty() {
            return Err(invalid("forecasters", "configure at least one forecaster"));
        }
        for kind in &self.forecasters {
            kind.validate()?;
            if kind.min_len() > self.slice_len {
                return Err(invalid(
                    "forecasters",
                    format!(
                        "{kind} needs {} observations but slices hold {}",
                        kind.min_len(),
                        self.slice_len
                    ),
                ));
            }
        }
        if self.tree.min_leaf == 0 {
            return Err(invalid("tree.min_leaf", "must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid("delta", "must lie in (0, 1)"));
        }
        self.solver_options().validate()
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            max_iters: self.solver.max_iters,
            tol: self.solver.tol,
            epsilon: self.epsilon,
            ..SolverOptions::default()
        }
    }

    /// Observations needed to cut all slices.
    pub fn min_series_len(&self) -> usize {
        self.slice_len * self.slice_count
    }
}
