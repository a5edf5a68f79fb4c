//! Command-line front end.
//!
//! Settings come from flags, then from an optional flat `key = value` file given
//! with `--config`, then from the defaults. Exit codes: 0 on success, 1 when a
//! run fails, 2 for configuration errors.

mod config;

pub use config::{ConfigFile, ExperimentConfig};

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data::{write_synthetic_tree, Stage};
use crate::error::{Error, Result};
use crate::fed::{train_and_evaluate, FedConfig, RoundRecord, StageResult};
use crate::lenet::save_weights;
use crate::metrics::{write_json, write_roc_csv, EvalReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fedtl", version, about = "Two-stage federated transfer learning on a small CNN")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train on the whole training set at one site.
    Centralized(RunArgs),
    /// One federated run of a single stage.
    Federated(RunArgs),
    /// Federated runs over a range of averaging intervals.
    Sweep(RunArgs),
    /// Stage one, then stage two initialised from stage one's weights.
    TwoStage(RunArgs),
    /// Write a synthetic `healthy/ covid/ non_covid/` PGM tree.
    Synth(SynthArgs),
}

#[derive(Debug, Default, Clone, Args)]
pub struct RunArgs {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// centralized | federated (two-stage only).
    #[arg(long)]
    pub mode: Option<String>,
    /// one | two
    #[arg(long)]
    pub stage: Option<String>,
    #[arg(long)]
    pub clients: Option<usize>,
    /// Local epochs per round.
    #[arg(long)]
    pub interval: Option<usize>,
    /// Training rounds (epochs when centralized); stage one's count for two-stage.
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Stage two's rounds for two-stage.
    #[arg(long)]
    pub rounds_two: Option<usize>,
    #[arg(long)]
    pub lr: Option<f32>,
    #[arg(long)]
    pub batch: Option<usize>,
    /// balanced | unbalanced
    #[arg(long)]
    pub distribution: Option<String>,
    /// Root with healthy/, covid/ and non_covid/ PGM folders.
    #[arg(long, conflicts_with = "synthetic")]
    pub data_dir: Option<PathBuf>,
    /// Generate this many examples per class instead of reading images.
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Stage-one weight file for a stage-two run.
    #[arg(long)]
    pub pretrained: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Interval range `a..b`, inclusive.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Train clients one after another instead of in parallel.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Images per category (healthy, covid, non_covid).
    #[arg(long, default_value_t = 100)]
    pub per_category: usize,
    /// Width and height of the written images.
    #[arg(long, default_value_t = 64)]
    pub side: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Configuration problems exit with 2; everything else that fails exits with 1.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::StageOrdering(_)
        | Error::MissingDirectory(_)
        | Error::Partition(_)
        | Error::WeightFileMissing(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Centralized(args) => cmd_centralized(&ExperimentConfig::resolve(&args, config::Kind::Centralized)?),
        Command::Federated(args) => cmd_federated(&ExperimentConfig::resolve(&args, config::Kind::Federated)?),
        Command::Sweep(args) => cmd_sweep(&ExperimentConfig::resolve(&args, config::Kind::Sweep)?),
        Command::TwoStage(args) => cmd_two_stage(&ExperimentConfig::resolve(&args, config::Kind::TwoStage)?),
        Command::Synth(args) => cmd_synth(&args),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))
}

fn write_history(history: &[RoundRecord], path: &Path) -> Result<()> {
    let mut text = String::new();
    for record in history {
        text.push_str(&serde_json::to_string(record)?);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// `report.json`, `roc.csv`, `history.jsonl` and `weights.fstw` in `dir`.
fn write_stage_outputs(result: &StageResult, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    write_json(&result.report, dir.join("report.json"))?;
    write_roc_csv(&result.report.roc, dir.join("roc.csv"))?;
    write_history(&result.run.history, &dir.join("history.jsonl"))?;
    save_weights(&result.run.weights, dir.join("weights.fstw"))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn announce(report: &EvalReport, dir: &Path) {
    println!(
        "{} {}: accuracy {:.4}, auc {:.4}, precision {}, sensitivity {}, specificity {} -> {}",
        report.stage,
        report.setting,
        report.accuracy,
        report.auc,
        report.precision.map_or("n/a".into(), |v| format!("{v:.4}")),
        report.sensitivity.map_or("n/a".into(), |v| format!("{v:.4}")),
        report.specificity.map_or("n/a".into(), |v| format!("{v:.4}")),
        dir.display()
    );
}

fn single_stage(cfg: &ExperimentConfig, fed: &FedConfig, dir: &Path) -> Result<EvalReport> {
    let data = cfg.source.load(cfg.stage)?;
    let options = cfg.pipeline_options();
    let (train, test) = options.split(&data)?;
    let result = train_and_evaluate(fed, &options, &train, &test)?;
    write_stage_outputs(&result, dir)?;
    announce(&result.report, dir);
    Ok(result.report)
}

pub fn cmd_centralized(cfg: &ExperimentConfig) -> Result<()> {
    single_stage(cfg, &cfg.fed_config(cfg.stage, cfg.interval), &cfg.out).map(drop)
}

pub fn cmd_federated(cfg: &ExperimentConfig) -> Result<()> {
    single_stage(cfg, &cfg.fed_config(cfg.stage, cfg.interval), &cfg.out).map(drop)
}

/// One federated run per interval, each in `out/interval_NN/`, plus `out/summary.csv`.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<()> {
    let mut summary = String::from("interval,auc,precision,sensitivity,specificity\n");
    for interval in cfg.sweep.clone() {
        let dir = cfg.out.join(format!("interval_{interval:02}"));
        let report = single_stage(cfg, &cfg.fed_config(cfg.stage, interval), &dir)?;
        summary.push_str(&format!(
            "{interval},{},{},{},{}\n",
            report.auc,
            fmt_opt(report.precision),
            fmt_opt(report.sensitivity),
            fmt_opt(report.specificity)
        ));
    }
    let path = cfg.out.join("summary.csv");
    fs::write(&path, summary).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Stage one into `out/stage_one/`, stage two into `out/stage_two/`.
pub fn cmd_two_stage(cfg: &ExperimentConfig) -> Result<()> {
    let dir_one = cfg.out.join("stage_one");
    let dir_two = cfg.out.join("stage_two");
    let weights = dir_one.join("weights.fstw");
    let one = FedConfig {
        save_to: Some(weights.clone()),
        ..cfg.fed_config(Stage::StageOne, cfg.interval)
    };
    let two = FedConfig {
        rounds: cfg.rounds_two,
        pretrained: Some(weights),
        ..cfg.fed_config(Stage::StageTwo, cfg.interval)
    };
    let outcome = crate::fed::run_two_stage(&one, &two, &cfg.source, &cfg.pipeline_options())?;
    write_stage_outputs(&outcome.stage_one, &dir_one)?;
    announce(&outcome.stage_one.report, &dir_one);
    write_stage_outputs(&outcome.stage_two, &dir_two)?;
    announce(&outcome.stage_two.report, &dir_two);
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    if args.per_category < 2 {
        return Err(Error::Config("--per-category must be at least 2".into()));
    }
    if args.side == 0 {
        return Err(Error::Config("--side must be positive".into()));
    }
    write_synthetic_tree(&args.out, [args.per_category; 3], args.side, args.seed)?;
    println!(
        "wrote {} images per category at {}x{} to {}",
        args.per_category,
        args.side,
        args.side,
        args.out.display()
    );
    Ok(())
}
