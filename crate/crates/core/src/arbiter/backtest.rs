//! Rolling-origin comparison of the drift-adjusted ensemble against the same
//! ensemble with the gate forced open.

use serde::{Deserialize, Serialize};

use super::pipeline::run_pipeline;
use crate::config::PipelineConfig;
use crate::error::{invalid, Error, Result};
use crate::metrics::mape;
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktestRow {
    /// Position of the held-out observation in the series.
    pub origin: usize,
    pub actual: f64,
    pub forecast_adjusted: f64,
    pub forecast_plain: f64,
    pub mape_adjusted: f64,
    pub mape_plain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub rows: Vec<BacktestRow>,
    pub mean_mape_adjusted: f64,
    pub mean_mape_plain: f64,
}

/// One-step forecasts from the last `origin_count` origins. At each origin
/// the history is everything before the held-out observation.
pub fn backtest(
    series: &TimeSeries,
    config: &PipelineConfig,
    origin_count: usize,
) -> Result<BacktestReport> {
    config.validate()?;
    if origin_count == 0 {
        return Err(invalid("origins", "must be at least 1"));
    }
    let required = config.min_series_len() + origin_count;
    if series.len() < required {
        return Err(Error::Sizing {
            required,
            actual: series.len(),
        });
    }
    let plain_config = PipelineConfig {
        p_threshold: 0.0,
        ..config.clone()
    };
    let first = series.len() - origin_count;
    let rows = (first..series.len())
        .map(|origin| {
            let history = series.prefix(origin)?;
            let actual = series.values()[origin];
            let adjusted = run_pipeline(&history, config)?.decision.combined[0];
            let plain = run_pipeline(&history, &plain_config)?.decision.combined[0];
            Ok(BacktestRow {
                origin,
                actual,
                forecast_adjusted: adjusted,
                forecast_plain: plain,
                mape_adjusted: mape(adjusted, actual)?,
                mape_plain: mape(plain, actual)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len() as f64;
    Ok(BacktestReport {
        mean_mape_adjusted: rows.iter().map(|r| r.mape_adjusted).sum::<f64>() / n,
        mean_mape_plain: rows.iter().map(|r| r.mape_plain).sum::<f64>() / n,
        rows,
    })
}
