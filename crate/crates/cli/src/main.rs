//! `aisq`: decode AIS logs, build datasets, train and evaluate classifiers.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 I/O error.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aisq::pipeline::{NormMode, Split, SplitMode, Transform};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "aisq", version, about = "Ship-type classification from AIS tracks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for per-vessel stages (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decode NMEA AIVDM logs into the records CSV.
    Decode(DecodeArgs),
    /// Turn a records CSV into a dataset directory of shards and a manifest.
    Build(BuildArgs),
    /// Train a model preset on a dataset.
    Train(TrainArgs),
    /// Evaluate a checkpoint on one split of a dataset.
    Eval(EvalArgs),
    /// Summarize a dataset directory or a checkpoint file.
    Inspect(InspectArgs),
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// NMEA log files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output CSV; counters go to `<out>.stats.json`.
    #[arg(short, long)]
    pub out: PathBuf,
    /// Multipart reassembly window in sentences.
    #[arg(long)]
    pub window: Option<u64>,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// Records CSV.
    #[arg(long)]
    pub records: PathBuf,
    /// Output dataset directory.
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long)]
    pub coast: Option<PathBuf>,
    #[arg(long)]
    pub harbors: Option<PathBuf>,
    #[arg(long)]
    pub rivers: Option<PathBuf>,
    #[arg(long)]
    pub max_coast_points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = ["360", "1080", "1800"])]
    pub seq_len: Option<String>,
    #[arg(long)]
    pub transform: Option<Transform>,
    #[arg(long)]
    pub norm: Option<NormMode>,
    #[arg(long)]
    pub split_mode: Option<SplitMode>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Dataset directory.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Output directory for the checkpoint and history.
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Enable or disable batch normalization, overriding the preset default.
    #[arg(long)]
    pub batch_norm: Option<bool>,
    /// Weight the loss by inverse class frequency.
    #[arg(long)]
    pub class_weights: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value = "test")]
    pub split: Split,
    /// Output directory for `eval_<split>.{json,txt,svg}`.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    /// Dataset directory or checkpoint file.
    pub path: PathBuf,
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = RunConfig::load(cli.global.config.as_deref())?;
    if cli.global.workers.is_some() {
        cfg.workers = cli.global.workers;
    }
    let command = cli.command;
    with_workers(cfg.workers, move || match command {
        Command::Decode(a) => commands::decode(cfg, a),
        Command::Build(a) => commands::build(cfg, a),
        Command::Train(a) => commands::train(cfg, a),
        Command::Eval(a) => commands::eval(cfg, a),
        Command::Inspect(a) => commands::inspect(a),
    })
}

#[cfg(feature = "parallel")]
fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> CliResult<T> + Send) -> CliResult<T> {
    match workers {
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> CliResult<T> + Send) -> CliResult<T> {
    if workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    f()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aisq: {e}");
            e.exit_code()
        }
    }
}
