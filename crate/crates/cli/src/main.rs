mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use eosl_core::Metric;

use crate::error::CliError;

/// Rank candidate encoders by energy-optimized semantic loss.
#[derive(Debug, Parser)]
#[command(name = "eosl", version, about, propagate_version = true)]
struct Cli {
    /// Worker threads for item scoring (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score every item once and write scored rows, leaderboards and SPR.
    Score(ScoreArgs),
    /// Rank growing prefixes of the manifest with cumulative blending.
    Rounds(RoundsArgs),
    /// Tabulate loss against bit-error probability for each weight profile.
    Sweep(SweepArgs),
    /// Similarity-to-power ratio of an existing leaderboard.
    Spr(SprArgs),
    /// Check any input file and report the first violation.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct Inputs {
    /// Dataset manifest.
    #[arg(long)]
    manifest: PathBuf,
    /// Run config; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; without it a summary goes to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Similarity metric; overrides the config.
    #[arg(long, value_parser = parse_metric)]
    metric: Option<Metric>,
}

#[derive(Debug, Args)]
pub struct RoundsArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Strictly increasing prefix sizes, e.g. 10,25,50,100.
    #[arg(long, value_delimiter = ',')]
    rounds: Option<Vec<usize>>,
    /// Weight on the current round; beta defaults to 1 - alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Weight on history; alpha defaults to 1 - beta.
    #[arg(long)]
    beta: Option<f64>,
    /// Similarity metric; overrides the config.
    #[arg(long, value_parser = parse_metric)]
    metric: Option<Metric>,
    /// Checkpoint whose cumulative state seeds the first round.
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Run config; its `manifest` selects the fleet, else the built-in one.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-5)]
    pb_min: f64,
    #[arg(long, default_value_t = 0.1)]
    pb_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Space points evenly in log10.
    #[arg(long)]
    log_scale: bool,
    /// Weight profiles separated by `;`, e.g. "sm=1,lch=0;es=2".
    #[arg(long)]
    lambda_grid: Option<String>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SprArgs {
    /// Leaderboard JSON as written by `score` or `rounds`.
    #[arg(long)]
    board: PathBuf,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// File to check.
    #[arg(long)]
    path: PathBuf,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|_| format!("expected one of cosine, ssim, bleu, jaccard; got `{s}`"))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| CliError::Data(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Score(a) => commands::score(&a),
        Command::Rounds(a) => commands::rounds(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Spr(a) => commands::spr_cmd(&a),
        Command::Validate(a) => commands::validate(&a),
    }
}

/// Usage line of the subcommand named on the command line, else the root's.
fn usage() -> String {
    let mut cmd = Cli::command();
    cmd.build();
    let name = std::env::args().skip(1).find(|a| cmd.find_subcommand(a).is_some());
    match name.and_then(|n| cmd.find_subcommand_mut(&n).map(|s| s.render_usage())) {
        Some(u) => u.to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EOSL_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprint!("{}", e.render());
            if !e.render().to_string().contains("Usage:") {
                eprintln!("\n{}", usage());
            }
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
