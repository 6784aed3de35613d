//! Meta-learned combination of the base forecasters.
//!
//! Each historical slice yields a row of quantile features and per-forecaster
//! one-step errors. One regression tree per forecaster maps features to
//! expected error; the newest slice's features give the predicted errors,
//! and a softmax over their negatives gives the ensemble weights.

mod backtest;
mod pipeline;
mod records;
mod softmax;
pub mod tree;

pub use backtest::{backtest, BacktestReport, BacktestRow};
pub use pipeline::{
    run_pipeline, run_pipeline_with, Diagnostics, EnsembleDecision, PipelineOutput,
};
pub use records::{build_slice_records, build_slice_records_with, RecordSet, SliceRecord};
pub use softmax::softmax_weights;
pub use tree::{RegressionTree, TreeRow};
