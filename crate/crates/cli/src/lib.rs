//! `drift-arbiter` command line: synthesize series, run the ensemble, and
//! backtest it against the same ensemble without drift adjustment.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

pub mod config;
pub mod format;
pub mod io;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use drift_arbiter::{backtest, run_pipeline, synthesize, Error as CoreError};
use log::info;

use crate::config::{FileConfig, Overrides};
use crate::format::fmt_num;
use crate::io::{read_series, series_csv, write_atomic};
use crate::report::{backtest_csv, forecast_csv, DecisionReport};

pub const LOG_ENV: &str = "DRIFT_ARBITER_LOG";

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration.
    Usage(String),
    /// Unusable input series or a series that does not fit the config.
    Data(String),
    /// Output could not be written.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. } | CoreError::InfeasibleStart { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "drift-arbiter",
    version,
    about = "Drift-adjusted arbitrated forecasting ensemble"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic piecewise-mean series as `t,value` CSV.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Fit the ensemble and write forecast.csv and decision.json.
    Run {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Rolling-origin comparison with and without drift adjustment.
    Backtest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        origins: usize,
        #[arg(long)]
        outdir: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct OverrideArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub p_threshold: Option<f64>,
    #[arg(long)]
    pub bound: Option<f64>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides {
            seed: a.seed,
            horizon: a.horizon,
            p_threshold: a.p_threshold,
            bound: a.bound,
        }
    }
}

pub fn cmd_synth(config: &Path, out: &Path, overrides: Overrides) -> Result<(), CliError> {
    let synth = FileConfig::load(config)?.synth(&overrides)?;
    let series = synthesize(&synth)?;
    write_atomic(out, series_csv(&series).as_bytes())?;
    info!("wrote {} observations to {}", series.len(), out.display());
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

pub fn cmd_run(
    input: &Path,
    config: &Path,
    outdir: &Path,
    overrides: Overrides,
) -> Result<DecisionReport, CliError> {
    let pipeline = FileConfig::load(config)?.pipeline(&overrides)?;
    let series = read_series(input)?;
    let output = run_pipeline(&series, &pipeline)?;
    let report = DecisionReport::new(&output, pipeline.error_units);
    ensure_dir(outdir)?;
    write_atomic(
        &outdir.join("forecast.csv"),
        forecast_csv(&output.decision.combined).as_bytes(),
    )?;
    write_atomic(&outdir.join("decision.json"), report.to_json().as_bytes())?;
    info!("weights {:?}", output.decision.weights);
    Ok(report)
}

pub fn cmd_backtest(
    input: &Path,
    config: &Path,
    origins: usize,
    outdir: &Path,
    overrides: Overrides,
) -> Result<drift_arbiter::BacktestReport, CliError> {
    let pipeline = FileConfig::load(config)?.pipeline(&overrides)?;
    if origins == 0 {
        return Err(CliError::Usage("--origins must be at least 1".into()));
    }
    let series = read_series(input)?;
    let report = backtest(&series, &pipeline, origins)?;
    ensure_dir(outdir)?;
    write_atomic(
        &outdir.join("backtest.csv"),
        backtest_csv(&report).as_bytes(),
    )?;
    Ok(report)
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth {
            config,
            out,
            overrides,
        } => cmd_synth(&config, &out, overrides.into()),
        Command::Run {
            input,
            config,
            outdir,
            overrides,
        } => cmd_run(&input, &config, &outdir, overrides.into()).map(|_| ()),
        Command::Backtest {
            input,
            config,
            origins,
            outdir,
            overrides,
        } => {
            let report = cmd_backtest(&input, &config, origins, &outdir, overrides.into())?;
            println!("mean_mape_adjusted {}", fmt_num(report.mean_mape_adjusted));
            println!("mean_mape_plain {}", fmt_num(report.mean_mape_plain));
            Ok(())
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
