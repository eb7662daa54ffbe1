//! Command-line front end for the rankAD pipeline.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::FileConfig;

#[derive(Parser)]
#[command(
    name = "rankad",
    version,
    about = "Ranking-based anomaly detection: train, score, evaluate, cross-validate, synthesize, export grids"
)]
struct Cli {
    /// Optional TOML config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate nominal p-values, train the kernel ranker, save the model.
    Train(TrainArgs),
    /// Score a test CSV with a saved model (g, score, verdict per row).
    Score(ScoreArgs),
    /// Evaluate a labeled test CSV: AUC, false-alarm rates, KS, timing.
    Eval(EvalArgs),
    /// 4-fold cross-validation of (C, sigma) under pairwise disagreement.
    Cv(CvArgs),
    /// Draw from the built-in synthetic densities.
    Synth(SynthArgs),
    /// Evaluate a saved model on a planar grid for level-curve plots.
    Grid(GridArgs),
}

#[derive(Args)]
pub struct TrainArgs {
    /// Nominal training CSV.
    #[arg(long)]
    data: PathBuf,
    /// Output path for the model archive.
    #[arg(long)]
    out: PathBuf,
    /// First row of the CSV is a header.
    #[arg(long)]
    has_header: bool,
    /// Zero-based label column to strip from the coordinates.
    #[arg(long)]
    label_column: Option<usize>,
    /// Neighbor count for the K-NN statistic.
    #[arg(long)]
    k: Option<usize>,
    /// Quantization level count m.
    #[arg(long)]
    levels: Option<u32>,
    /// Resampling rounds for the nominal score table.
    #[arg(long)]
    rounds: Option<usize>,
    /// Neighborhood statistic: mean-k | kth | eps.
    #[arg(long)]
    stat_mode: Option<String>,
    /// Ball radius for --stat-mode eps.
    #[arg(long)]
    eps: Option<f64>,
    /// Margin-violation cost C.
    #[arg(long)]
    cost: Option<f64>,
    /// RBF bandwidth; defaults to the mean k-NN distance of the data.
    #[arg(long)]
    sigma: Option<f64>,
    /// Cap on generated preference pairs (default 200 * n).
    #[arg(long)]
    cap: Option<usize>,
    /// Solver KKT tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Solver sweep limit.
    #[arg(long)]
    max_passes: Option<usize>,
    /// Seed for every randomized stage.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
pub struct ScoreArgs {
    /// Model archive from `train`.
    #[arg(long)]
    model: PathBuf,
    /// Test CSV to score.
    #[arg(long)]
    data: PathBuf,
    /// Output CSV (g, score, verdict).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    has_header: bool,
    /// Zero-based label column to strip before scoring.
    #[arg(long)]
    label_column: Option<usize>,
    /// False-alarm level for the verdict column.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Labeled test CSV (both classes present).
    #[arg(long)]
    data: PathBuf,
    /// Zero-based label column (0 nominal, 1 anomalous).
    #[arg(long)]
    label_column: usize,
    #[arg(long)]
    has_header: bool,
    /// False-alarm levels to report, e.g. --alphas 0.05,0.1,0.2.
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    /// Output report path (flat key=value text).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct CvArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    has_header: bool,
    #[arg(long)]
    label_column: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    stat_mode: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated C grid; defaults to the 0.001..1000 ladder.
    #[arg(long)]
    costs: Option<String>,
    /// Comma-separated sigma grid; defaults to 2^i times the mean k-NN
    /// distance for i in -10..=10.
    #[arg(long)]
    sigmas: Option<String>,
    #[arg(long)]
    folds: Option<usize>,
    /// Cap on training pairs per fold.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_passes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
pub struct SynthArgs {
    /// toy-fig1 | toy-sec72 | uniform-box.
    #[arg(long)]
    density: String,
    /// Number of points to draw.
    #[arg(long)]
    n: usize,
    /// Box bounds lo,hi,lo,hi (uniform-box only).
    #[arg(long)]
    bounds: Option<String>,
    /// Constant label column to append (0 or 1).
    #[arg(long)]
    label: Option<u8>,
    /// Write a header row.
    #[arg(long)]
    header: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct GridArgs {
    #[arg(long)]
    model: PathBuf,
    /// Grid bounds lo,hi,lo,hi.
    #[arg(long)]
    bounds: Option<String>,
    /// Points per axis.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match FileConfig::load(cli.config.as_deref()) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    let result = match &cli.command {
        Command::Train(args) => commands::cmd_train(args, &file),
        Command::Score(args) => commands::cmd_score(args, &file),
        Command::Eval(args) => commands::cmd_eval(args, &file),
        Command::Cv(args) => commands::cmd_cv(args, &file),
        Command::Synth(args) => commands::cmd_synth(args, &file),
        Command::Grid(args) => commands::cmd_grid(args, &file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
