//! Per-slice meta-learning rows.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::config::{ActualReference, FeatureSource, PipelineConfig};
use crate::drift::{adjust_slice, GateTest};
use crate::error::{Error, Result};
use crate::features::{quantile_features, QuantileFeatures};
use crate::forecast::Forecaster;
use crate::metrics::mape;
use crate::series::{Slice, TimeSeries};

/// Quantile features of a historical slice together with each forecaster's
/// one-step error on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceRecord {
    pub slice_index: usize,
    pub features: QuantileFeatures,
    /// One entry per forecaster, in configuration order, in the configured
    /// error units.
    pub errors: Vec<f64>,
    pub adjusted: bool,
    pub gate: GateTest,
    pub objective: f64,
    pub weight_mean: f64,
}

impl SliceRecord {
    pub fn p_value(&self) -> f64 {
        self.gate.p_value()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RecordSet {
    pub records: Vec<SliceRecord>,
    /// Slices skipped because their next observation is exactly zero.
    pub dropped: Vec<usize>,
}

fn record_for(
    slice: &Slice,
    newest: &Slice,
    config: &PipelineConfig,
    models: &[&dyn Forecaster],
) -> Result<Option<SliceRecord>> {
    let actual = slice
        .next_actual
        .expect("historical slices always know their next observation");
    if actual == 0.0 {
        warn!(
            "slice {} dropped: next observation is 0, percentage error undefined",
            slice.index
        );
        return Ok(None);
    }
    let adjusted = adjust_slice(
        &slice.values,
        &newest.values,
        config.p_threshold,
        config.bound,
        &config.solver_options(),
    )?;
    let feature_values = match config.feature_source {
        FeatureSource::Adjusted => &adjusted.values,
        FeatureSource::Raw => &slice.values,
    };
    let features = quantile_features(feature_values, config.quantiles)?;
    let reference = match config.actual_reference {
        ActualReference::Original => actual,
        ActualReference::Rescaled => {
            let raw: f64 = slice.values.iter().sum();
            let weighted: f64 = adjusted.values.iter().sum();
            if raw == 0.0 {
                actual
            } else {
                actual * weighted / raw
            }
        }
    };
    let errors = models
        .iter()
        .map(|model| {
            let forecast = model.fit_forecast(&adjusted.values, 1)?[0];
            Ok(config.error_units.from_percent(mape(forecast, reference)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Some(SliceRecord {
        slice_index: slice.index,
        features,
        errors,
        adjusted: adjusted.adjustment.adjusted,
        gate: adjusted.gate,
        objective: adjusted.adjustment.objective,
        weight_mean: adjusted.adjustment.weight_mean(),
    }))
}

/// Records for slices `1..n-1` of an already partitioned series.
pub(crate) fn records_from_slices(
    slices: &[Slice],
    config: &PipelineConfig,
    models: &[&dyn Forecaster],
) -> Result<RecordSet> {
    let (newest, history) = slices.split_last().ok_or(Error::Empty("slices"))?;
    let mut set = RecordSet::default();
    for slice in history {
        match record_for(slice, newest, config, models)? {
            Some(record) => set.records.push(record),
            None => set.dropped.push(slice.index),
        }
    }
    Ok(set)
}

/// Gate, adjust, featurise and score every historical slice of `series`.
pub fn build_slice_records_with(
    series: &TimeSeries,
    config: &PipelineConfig,
    models: &[&dyn Forecaster],
) -> Result<RecordSet> {
    config.validate()?;
    let slices =
        crate::series::partition_slices(series, config.slice_len, config.slice_count, None)?;
    records_from_slices(&slices, config, models)
}

/// [`build_slice_records_with`] using the configured forecasters.
pub fn build_slice_records(series: &TimeSeries, config: &PipelineConfig) -> Result<RecordSet> {
    let models: Vec<&dyn Forecaster> = config
        .forecasters
        .iter()
        .map(|k| k as &dyn Forecaster)
        .collect();
    build_slice_records_with(series, config, &models)
}
