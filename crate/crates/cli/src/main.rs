//! `art`: fit, apply and inspect transfer models, and run the simulation suite.

mod commands;
mod config;
mod model_file;

use std::path::PathBuf;
use std::process::ExitCode;

use art_core::{ArtError, Task, WeightMode};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<ArtError> for CliError {
    fn from(e: ArtError) -> Self {
        let msg = e.to_string();
        match e {
            ArtError::Config(_) | ArtError::UnsupportedLearner(_) => CliError::Config(msg),
            ArtError::Numerical(_) => CliError::Numerical(msg),
            ArtError::InvalidInput(_)
            | ArtError::InsufficientData(_)
            | ArtError::EmptyTest
            | ArtError::Data(_)
            | ArtError::Io(_)
            | ArtError::Csv(_) => CliError::Data(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "art",
    version,
    about = "Adaptive transfer with exponential weights"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Values given here override `--config`.
#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Weight temperature; defaults to the sample-size rule.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Number of random primary splits.
    #[arg(long)]
    pub splits: Option<usize>,
    #[arg(long, value_parser = parse_weight_mode)]
    pub weight_mode: Option<WeightMode>,
    /// Candidate priors as a comma-separated list.
    #[arg(long)]
    pub priors: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with defaults for any of these settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = ["full", "fast"])]
    pub profile: Option<String>,
}

fn parse_weight_mode(s: &str) -> Result<WeightMode, String> {
    s.parse().map_err(|e: ArtError| e.to_string())
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.parse().map_err(|e: ArtError| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model on a primary CSV and optional auxiliary CSVs.
    Fit(FitArgs),
    /// Apply a saved model to a CSV.
    Predict(PredictArgs),
    /// Variable importance of a saved model.
    Importance(ImportanceArgs),
    /// Run a named simulation scenario.
    Sim(SimArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub primary: Option<PathBuf>,
    /// Auxiliary CSV; repeat for several.
    #[arg(long = "aux")]
    pub auxiliary: Vec<PathBuf>,
    #[arg(long)]
    pub response: Option<String>,
    #[arg(long, value_parser = parse_task)]
    pub task: Option<Task>,
    /// Learner such as `ols`, `ridge:penalty=0.5`, `knn:k=5`; repeat for several.
    #[arg(long = "learner")]
    pub learners: Vec<String>,
    /// `squared`, `asymmetric:tau=0.3` or `cross_entropy[:clip=1e-6]`.
    #[arg(long)]
    pub loss: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Scenario name, e.g. ex411.
    pub name: String,
    #[command(flatten)]
    pub common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => commands::fit(&a),
        Command::Predict(a) => commands::predict(&a),
        Command::Importance(a) => commands::importance(&a),
        Command::Sim(a) => commands::sim(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("art: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
