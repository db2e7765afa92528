//! `tta`: test-time augmentation experiments from the command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tta_core::TransformKind;

#[derive(Parser, Debug)]
#[command(name = "tta", version, about = "Test-time augmentation for black-box text classifiers")]
struct Cli {
    /// JSON run configuration; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Document-level worker threads (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print transformed variants of one text.
    Augment(AugmentArgs),
    /// Predict labels for texts, optionally with a TTA policy.
    Predict(PredictArgs),
    /// Evaluate policies on a labelled dataset and write report.json + summary.csv.
    Evaluate(EvaluateArgs),
    /// Evaluate every preset policy over a set of word transforms.
    Sweep(SweepArgs),
    /// Train the built-in bag-of-words classifier.
    TrainBuiltin(TrainArgs),
    /// Turn a report.json into plot-ready CSV tables.
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct ModelArgs {
    /// Built-in model file, or `toy` to train on the bundled toy corpus.
    #[arg(long)]
    model: Option<String>,

    /// External classifier command speaking the line-JSON protocol
    /// (whitespace-separated program and arguments).
    #[arg(long, conflicts_with = "model")]
    subprocess: Option<String>,

    /// Per-batch reply deadline for --subprocess, in seconds.
    #[arg(long)]
    timeout: Option<f64>,

    /// Disable the prediction cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args, Debug, Clone, Default)]
struct PolicyArgs {
    /// Policy JSON file.
    #[arg(long)]
    policy: Option<PathBuf>,

    /// Preset(s): 1s1a, 1s4a, 4s1a, 4s4a, `all`, or `original`. Repeatable.
    #[arg(long, value_delimiter = ',')]
    preset: Vec<String>,

    /// Registered transform names used by the presets.
    #[arg(long, value_delimiter = ',')]
    transforms: Vec<String>,
}

#[derive(Args, Debug)]
struct AugmentArgs {
    /// Transform kind, e.g. WORD_DELETE or synonym_lexicon.
    #[arg(long, conflicts_with = "transform", required_unless_present = "transform")]
    kind: Option<TransformKind>,

    /// Registered transform name, e.g. synonym_informal.
    #[arg(long)]
    transform: Option<String>,

    /// Number of variants.
    #[arg(short = 'n', long, default_value_t = 4)]
    n: usize,

    /// Lexicon or table TSV replacing the kind's bundled resource.
    #[arg(long)]
    lexicon: Option<PathBuf>,

    /// Word-vector file replacing the bundled embeddings.
    #[arg(long)]
    embeddings: Option<PathBuf>,

    /// Document id; part of the random substream.
    #[arg(long, default_value = "input")]
    id: String,

    text: String,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[command(flatten)]
    model: ModelArgs,

    #[command(flatten)]
    policy: PolicyArgs,

    /// File with one text per line (instead of positional texts).
    #[arg(long)]
    input: Option<PathBuf>,

    texts: Vec<String>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Dataset file (CSV `id,text,label` or JSONL), or `toy-test` / `toy-train`.
    #[arg(long)]
    dataset: Option<String>,

    #[command(flatten)]
    model: ModelArgs,

    #[command(flatten)]
    policy: PolicyArgs,

    /// Output directory.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,

    /// Significance threshold.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    dataset: Option<String>,

    #[command(flatten)]
    model: ModelArgs,

    /// 1s1a, 1s4a, 4s1a or 4s4a.
    #[arg(long)]
    mode: Option<String>,

    /// Restrict the registry to these word transforms.
    #[arg(long, value_delimiter = ',')]
    transforms: Vec<String>,

    #[arg(long, short = 'o')]
    output: Option<PathBuf>,

    #[arg(long)]
    alpha: Option<f64>,

    /// Continue from the checkpoint in the output directory.
    #[arg(long)]
    resume: bool,

    #[arg(long, hide = true)]
    stop_after: Option<usize>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Training data (CSV or JSONL), or `toy-train`.
    #[arg(long)]
    train: String,

    /// Model file to write.
    #[arg(long, short = 'o')]
    output: PathBuf,

    #[arg(long)]
    epochs: Option<usize>,

    #[arg(long)]
    learning_rate: Option<f64>,

    #[arg(long)]
    l2: Option<f64>,

    /// Minimum n-gram count for the vocabulary.
    #[arg(long)]
    min_count: Option<usize>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// report.json written by `evaluate`.
    #[arg(long)]
    input: PathBuf,

    /// Directory for the CSV tables.
    #[arg(long, short = 'o')]
    output: PathBuf,
}

/// Errors in how the tool was invoked rather than in the run itself.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<tta_core::Error>() {
        Some(tta_core::Error::Config(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Augment(a) => commands::augment(&cli, a),
        Command::Predict(a) => commands::predict(&cli, a),
        Command::Evaluate(a) => commands::evaluate(&cli, a),
        Command::Sweep(a) => commands::sweep(&cli, a),
        Command::TrainBuiltin(a) => commands::train_builtin(&cli, a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
