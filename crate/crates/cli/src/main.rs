//! `it2frbc` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use it2frbc::{ErrorKind, MissingPolicy, ReportFormat, SyntheticKind};

#[derive(Debug, Parser)]
#[command(
    name = "it2frbc",
    version,
    about = "Interval type-2 fuzzy rule-based classifier"
)]
pub struct Cli {
    /// Leave out the timestamp line of the configuration header.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one of the synthetic datasets as CSV.
    GenData(GenDataArgs),
    /// Run subtractive clustering on a CSV file and write the centers.
    Cluster(ClusterArgs),
    /// Train a rule base on a split of a labeled CSV file and save it.
    Train(TrainArgs),
    /// Classify every row of a CSV file with a saved model.
    Predict(PredictArgs),
    /// Repeated split/train/test experiment with aggregate accuracy.
    Eval(EvalArgs),
    /// Print the rules of a saved model.
    ExportRules(ExportRulesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Generator {
    Circular,
    Irregular,
}

impl From<Generator> for SyntheticKind {
    fn from(g: Generator) -> Self {
        match g {
            Generator::Circular => SyntheticKind::Circular,
            Generator::Irregular => SyntheticKind::Irregular,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Missing {
    /// Skip rows with an empty or `?` field.
    Drop,
    /// Reject the file.
    Error,
}

impl From<Missing> for MissingPolicy {
    fn from(m: Missing) -> Self {
        match m {
            Missing::Drop => MissingPolicy::DropRow,
            Missing::Error => MissingPolicy::Error,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => ReportFormat::Table,
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long, value_enum)]
    pub which: Generator,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Input file with an optional label column.
#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Zero-based index of the class label column; defaults to the last column.
    #[arg(long)]
    pub label_col: Option<usize>,
    #[arg(long, value_enum, default_value_t = Missing::Drop)]
    pub missing: Missing,
}

/// Subtractive clustering settings other than the radius.
#[derive(Debug, Args)]
pub struct TuningArgs {
    /// Ratio r_b / r_a of the revision radius.
    #[arg(long, default_value_t = 1.25)]
    pub rb_ratio: f64,
    /// Potential ratio at or above which a candidate center is accepted.
    #[arg(long, default_value_t = 0.5)]
    pub accept: f64,
    /// Potential ratio below which the search stops.
    #[arg(long, default_value_t = 0.15)]
    pub reject: f64,
    /// Upper bound on the centers per clustering call.
    #[arg(long)]
    pub max_centers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SelectionArgs {
    /// Cluster radius r_a, in normalized units.
    #[arg(long, required_unless_present = "no_sc", conflicts_with = "no_sc")]
    pub ra: Option<f64>,
    /// One prototype per class at the class mean.
    #[arg(long)]
    pub no_sc: bool,
    #[command(flatten)]
    pub tuning: TuningArgs,
}

#[derive(Debug, Args)]
pub struct FuzzyArgs {
    #[arg(long, default_value_t = 1.5)]
    pub m1: f64,
    #[arg(long, default_value_t = 2.5)]
    pub m2: f64,
    /// Exponent of the quasiarithmetic mean; must be non-zero.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Input file; every column except the label column is a feature.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Zero-based column to leave out of the features.
    #[arg(long)]
    pub label_col: Option<usize>,
    #[arg(long)]
    pub ra: f64,
    #[command(flatten)]
    pub tuning: TuningArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    pub fuzzy: FuzzyArgs,
    /// Seed of the train/test shuffle.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Fraction of patterns used for training; 1 trains on everything.
    #[arg(long, default_value_t = 0.5)]
    pub train_frac: f64,
    #[arg(long)]
    pub stratified: bool,
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Zero-based label column; when given it is skipped and accuracy is reported.
    #[arg(long)]
    pub label_col: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(
        long = "in",
        value_name = "FILE",
        conflicts_with = "gen",
        required_unless_present = "gen"
    )]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub label_col: Option<usize>,
    #[arg(long, value_enum, default_value_t = Missing::Drop)]
    pub missing: Missing,
    /// Use a synthetic dataset instead of a file.
    #[arg(long, value_enum)]
    pub gen: Option<Generator>,
    /// Seed of the synthetic dataset.
    #[arg(long, default_value_t = 1)]
    pub data_seed: u64,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    pub fuzzy: FuzzyArgs,
    #[arg(long, default_value_t = 32)]
    pub runs: usize,
    /// Master seed; every run derives its own split seed from it.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub train_frac: f64,
    #[arg(long)]
    pub stratified: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = automatic). Overrides IT2FRBC_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExportRulesArgs {
    #[arg(long)]
    pub model: PathBuf,
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
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Data => 2,
                ErrorKind::Internal => 3,
            })
        }
    }
}
