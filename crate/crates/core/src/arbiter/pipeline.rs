//! End-to-end ensemble forecast.

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use super::records::{records_from_slices, SliceRecord};
use super::softmax::softmax_weights;
use super::tree::{RegressionTree, TreeRow};
use crate::config::PipelineConfig;
use crate::drift::{concentration_bounds, BoundReport};
use crate::error::Result;
use crate::features::{quantile_features, QuantileFeatures};
use crate::forecast::Forecaster;
use crate::series::{partition_slices, TimeSeries};

/// Per-forecaster predicted errors, weights and forecasts plus their
/// combination. All vectors follow the forecaster order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDecision {
    pub labels: Vec<String>,
    pub predicted_errors: Vec<f64>,
    pub weights: Vec<f64>,
    pub individual_forecasts: Vec<Vec<f64>>,
    pub combined: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub bounds: BoundReport,
    pub newest_features: QuantileFeatures,
    /// Slice indices skipped for a zero next observation.
    pub dropped_slices: Vec<usize>,
    /// True when too few records forced constant error predictors.
    pub degraded_trees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub decision: EnsembleDecision,
    pub records: Vec<SliceRecord>,
    pub diagnostics: Diagnostics,
}

/// Weighted combination per step, clamped into the hull of the individual
/// forecasts so rounding cannot leave it.
fn combine(weights: &[f64], forecasts: &[Vec<f64>], horizon: usize) -> Vec<f64> {
    (0..horizon)
        .map(|t| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut acc = 0.0;
            for (w, f) in weights.iter().zip(forecasts) {
                acc += w * f[t];
                lo = lo.min(f[t]);
                hi = hi.max(f[t]);
            }
            acc.clamp(lo, hi)
        })
        .collect()
}

fn error_predictors(
    records: &[SliceRecord],
    model_count: usize,
    config: &PipelineConfig,
) -> Result<(Vec<RegressionTree>, bool)> {
    let dim = config.quantiles + 1;
    if records.len() < 2 {
        warn!(
            "only {} usable slice record(s); error predictors fall back to constant means",
            records.len()
        );
        let trees = (0..model_count)
            .map(|k| {
                let mean = if records.is_empty() {
                    0.0
                } else {
                    records.iter().map(|r| r.errors[k]).sum::<f64>() / records.len() as f64
                };
                RegressionTree::constant(mean, records.len(), dim)
            })
            .collect();
        return Ok((trees, true));
    }
    let trees = (0..model_count)
        .map(|k| {
            let rows: Vec<TreeRow> = records
                .iter()
                .map(|r| TreeRow {
                    features: r.features.q.clone(),
                    target: r.errors[k],
                })
                .collect();
            RegressionTree::fit(&rows, config.tree.max_depth, config.tree.min_leaf)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((trees, false))
}

/// Runs the arbitrated ensemble with caller-supplied forecasters.
pub fn run_pipeline_with(
    series: &TimeSeries,
    config: &PipelineConfig,
    models: &[&dyn Forecaster],
) -> Result<PipelineOutput> {
    config.validate()?;
    if models.is_empty() {
        return Err(crate::error::invalid(
            "forecasters",
            "configure at least one forecaster",
        ));
    }
    let slices = partition_slices(series, config.slice_len, config.slice_count, None)?;
    let set = records_from_slices(&slices, config, models)?;
    let (trees, degraded) = error_predictors(&set.records, models.len(), config)?;

    let newest = slices.last().expect("at least two slices");
    let newest_features = quantile_features(&newest.values, config.quantiles)?;
    let predicted_errors = trees
        .iter()
        .map(|t| t.predict(&newest_features.q))
        .collect::<Result<Vec<f64>>>()?;
    let weights = softmax_weights(&predicted_errors)?;

    let individual_forecasts = models
        .iter()
        .map(|m| m.fit_forecast(series.values(), config.horizon))
        .collect::<Result<Vec<_>>>()?;
    let combined = combine(&weights, &individual_forecasts, config.horizon);

    let window = &series.values()[series.len() - config.min_series_len()..];
    let r = window
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let bounds = concentration_bounds(config.bound, r, config.slice_len, config.delta)?;

    debug!(
        "weights {:?} from predicted errors {:?}",
        weights, predicted_errors
    );
    Ok(PipelineOutput {
        decision: EnsembleDecision {
            labels: models.iter().map(|m| m.label()).collect(),
            predicted_errors,
            weights,
            individual_forecasts,
            combined,
        },
        records: set.records,
        diagnostics: Diagnostics {
            bounds,
            newest_features,
            dropped_slices: set.dropped,
            degraded_trees: degraded,
        },
    })
}

/// Runs the arbitrated ensemble with the configured forecasters.
pub fn run_pipeline(series: &TimeSeries, config: &PipelineConfig) -> Result<PipelineOutput> {
    let models: Vec<&dyn Forecaster> = config
        .forecasters
        .iter()
        .map(|k| k as &dyn Forecaster)
        .collect();
    run_pipeline_with(series, config, &models)
}
