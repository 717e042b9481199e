use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod settings;

use nhood_core::trace_io::TraceFormat;

#[derive(Debug, Parser)]
#[command(
    name = "nhood",
    version,
    about = "Neighborhood-aware WAIT analysis over contact traces"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory (output file for `gen`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Input trace format.
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<TraceFormat>,

    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

fn parse_format(s: &str) -> Result<TraceFormat, String> {
    s.parse().map_err(|e: nhood_core::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a trace file and print its summary.
    Validate { trace: PathBuf },

    /// Generate a synthetic trace from a mobility model (`rwp`, `community`).
    Gen(GenArgs),

    /// Classify pairs and tabulate mean T-neighborhood sizes.
    Analyze(AnalyzeArgs),

    /// Run the per-pair message experiment and write report CSVs.
    Simulate(SimulateArgs),

    /// Write discovery-overhead ledgers for a probing strategy.
    Overhead(OverheadArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub model: String,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub height: Option<f64>,
    #[arg(long)]
    pub vmin: Option<f64>,
    #[arg(long)]
    pub vmax: Option<f64>,
    /// Communication range in meters.
    #[arg(long)]
    pub range: Option<f64>,
    /// Seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub tick: Option<f64>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long)]
    pub bias: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub trace: PathBuf,
    /// Largest T to tabulate, or `inf` for node_count - 1.
    #[arg(long)]
    pub tmax: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub trace: PathBuf,
    /// Comma-separated T values and ranges, e.g. `1-5,8,inf`.
    #[arg(long)]
    pub t_values: Option<String>,
    #[arg(long)]
    pub messages_per_pair: Option<usize>,
    /// Seconds, or `inf`.
    #[arg(long)]
    pub ttl: Option<String>,
    /// Probing strategy for overhead totals (`ts`, `cs`, or `none`).
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub interval: Option<f64>,
    /// Create every message at this time instead of drawing it.
    #[arg(long)]
    pub t0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OverheadArgs {
    pub trace: PathBuf,
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub interval: Option<f64>,
    #[arg(long = "t")]
    pub threshold: Option<u32>,
    /// Nodes to probe from (continuous probing), comma-separated.
    #[arg(long)]
    pub node: Option<String>,
    /// Messages `src:dst`, comma-separated (triggered probing).
    #[arg(long)]
    pub pairs: Option<String>,
    #[arg(long)]
    pub window_start: Option<f64>,
    #[arg(long)]
    pub window_end: Option<f64>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub ttl: Option<String>,
    #[arg(long)]
    pub messages_per_pair: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration; exit 1.
    Usage(String),
    /// Bad input data; exit 2.
    Data(anyhow::Error),
}

impl From<nhood_core::Error> for CliError {
    fn from(e: nhood_core::Error) -> Self {
        match e {
            nhood_core::Error::InvalidConfig(_) | nhood_core::Error::UnknownName { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Data(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
