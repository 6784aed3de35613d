//! Output artifacts of the `run` and `backtest` commands.

use std::collections::BTreeMap;

use drift_arbiter::arbiter::Diagnostics;
use drift_arbiter::{BacktestReport, BoundReport, ErrorUnits, PipelineOutput};
use serde::Serialize;

use crate::format::fmt_num;

#[derive(Debug, Serialize)]
pub struct ModelEntry {
    pub label: String,
    pub predicted_error: f64,
    pub weight: f64,
    pub forecast: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SliceEntry {
    pub index: usize,
    pub adjusted: bool,
    pub p_value: f64,
    /// Absent when the paired differences are constant.
    pub t_stat: Option<f64>,
    pub objective: f64,
    pub weight_mean: f64,
    /// Keyed by forecaster label.
    pub errors: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize)]
pub struct DecisionReport {
    pub error_units: ErrorUnits,
    pub models: Vec<ModelEntry>,
    pub combined: Vec<f64>,
    pub slices: Vec<SliceEntry>,
    pub dropped_slices: Vec<usize>,
    pub degraded_trees: bool,
    pub bounds: BoundReport,
}

impl DecisionReport {
    pub fn new(out: &PipelineOutput, units: ErrorUnits) -> Self {
        let d = &out.decision;
        let Diagnostics {
            bounds,
            dropped_slices,
            degraded_trees,
            ..
        } = &out.diagnostics;
        let models = d
            .labels
            .iter()
            .enumerate()
            .map(|(k, label)| ModelEntry {
                label: label.clone(),
                predicted_error: d.predicted_errors[k],
                weight: d.weights[k],
                forecast: d.individual_forecasts[k].clone(),
            })
            .collect();
        let slices = out
            .records
            .iter()
            .map(|r| SliceEntry {
                index: r.slice_index,
                adjusted: r.adjusted,
                p_value: r.p_value(),
                t_stat: r.gate.t_stat(),
                objective: r.objective,
                weight_mean: r.weight_mean,
                errors: d
                    .labels
                    .iter()
                    .cloned()
                    .zip(r.errors.iter().copied())
                    .collect(),
            })
            .collect();
        Self {
            error_units: units,
            models,
            combined: d.combined.clone(),
            slices,
            dropped_slices: dropped_slices.clone(),
            degraded_trees: *degraded_trees,
            bounds: *bounds,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn forecast_csv(combined: &[f64]) -> String {
    let mut out = String::from("step,value\n");
    for (i, v) in combined.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, fmt_num(*v)));
    }
    out
}

/// Per-origin rows followed by an `aggregate` row holding the mean MAPEs.
pub fn backtest_csv(report: &BacktestReport) -> String {
    let mut out =
        String::from("origin,actual,forecast_adjusted,forecast_plain,mape_adjusted,mape_plain\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.origin,
            fmt_num(r.actual),
            fmt_num(r.forecast_adjusted),
            fmt_num(r.forecast_plain),
            fmt_num(r.mape_adjusted),
            fmt_num(r.mape_plain)
        ));
    }
    out.push_str(&format!(
        "aggregate,,,,{},{}\n",
        fmt_num(report.mean_mape_adjusted),
        fmt_num(report.mean_mape_plain)
    ));
    out
}
