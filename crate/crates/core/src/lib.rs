//! Arbitrated forecasting ensemble with drift adjustment.
//!
//! The tail of a series is cut into equal slices. Each older slice is
//! compared with the newest one by a paired t-test; when they differ, the
//! older slice is reweighted so its mean matches the newest slice. Base
//! forecasters are scored on every (possibly reweighted) slice, regression
//! trees learn to predict each forecaster's error from the slice's quantile
//! profile, and the final forecast weights the base forecasts by a softmax
//! over the errors predicted for the newest slice.

pub mod arbiter;
pub mod config;
pub mod drift;
pub mod error;
pub mod features;
pub mod forecast;
pub mod metrics;
pub mod series;
pub mod stats;
pub mod synth;

pub use arbiter::{
    backtest, build_slice_records, run_pipeline, run_pipeline_with, softmax_weights,
    BacktestReport, BacktestRow, EnsembleDecision, PipelineOutput, RegressionTree, SliceRecord,
    TreeRow,
};
pub use config::{ActualReference, FeatureSource, PipelineConfig, SolverConfig, TreeConfig};
pub use drift::{
    adjust_slice, concentration_bounds, solve_reweighting, AdjustedSlice, BoundReport,
    DriftAdjustment, GateTest, SolverOptions,
};
pub use error::{Error, Result};
pub use features::{quantile_features, QuantileFeatures};
pub use forecast::{FittedForecaster, Forecaster, ForecasterKind};
pub use metrics::{mape, ErrorUnits};
pub use series::{partition_slices, Slice, TimeSeries, Timing};
pub use stats::{one_sample_t_test, paired_t_test, t_cdf, GateDecision, TTestResult};
pub use synth::{synthesize, SynthConfig};
