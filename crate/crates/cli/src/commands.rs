use std::io::Write;
use std::path::Path;

use eosl_core::fleet::reference_items;
use eosl_core::io::{
    load_checkpoint, load_items, load_manifest, read_json_report, save_checkpoint, to_csv_bytes, validate_path,
    write_report, Cell, ReportFormat, ReportRow,
};
use eosl_core::selection::{
    build_leaderboard, default_profiles, p_b_grid, run_rounds, score_items, spr, sweep as run_sweep,
    validate_round_sizes, Criterion, EvaluationItem, LeaderboardRow, ScoredItem, ScoredRow, SprReport, SweepProfile,
};
use eosl_core::{CumulativeParams, CumulativeStore, RunConfig};
use log::info;
use serde::Serialize;

use crate::error::CliError;
use crate::{RoundsArgs, ScoreArgs, SprArgs, SweepArgs, ValidateArgs};

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => Ok(RunConfig::load(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn load_fleet(manifest: &Path) -> Result<Vec<EvaluationItem>, CliError> {
    let manifest = load_manifest(manifest)?;
    let items = load_items(&manifest)?;
    info!("loaded {} items, fleet {:?}", items.len(), manifest.models());
    Ok(items)
}

fn write_both<R: ReportRow>(dir: &Path, stem: &str, rows: &[R]) -> Result<(), CliError> {
    for format in [ReportFormat::Csv, ReportFormat::Json] {
        write_report(rows, format, &dir.join(format!("{stem}.{}", format.extension())))?;
    }
    Ok(())
}

fn stdout_bytes(bytes: &[u8]) -> Result<(), CliError> {
    std::io::stdout().lock().write_all(bytes).map_err(|e| CliError::Data(format!("stdout: {e}")))
}

fn flatten(items: &[ScoredItem]) -> Vec<ScoredRow> {
    items.iter().flat_map(|i| i.rows.iter().cloned()).collect()
}

/// Leaderboards and SPR for every criterion, in criterion order.
fn boards(items: &[ScoredItem]) -> Result<Vec<(Criterion, Vec<LeaderboardRow>, SprReport)>, CliError> {
    Criterion::ALL
        .into_iter()
        .map(|c| {
            let board = build_leaderboard(items, c)?;
            let report = spr(&board)?;
            Ok((c, board, report))
        })
        .collect()
}

fn write_scored(dir: &Path, scored: &[ScoredItem]) -> Result<Vec<SprReport>, CliError> {
    write_both(dir, "scored", &flatten(scored))?;
    let mut reports = Vec::new();
    for (c, board, report) in boards(scored)? {
        write_both(dir, &format!("leaderboard_{c}"), &board)?;
        reports.push(report);
    }
    write_both(dir, "spr", &reports)?;
    Ok(reports)
}

pub fn score(args: &ScoreArgs) -> Result<(), CliError> {
    let mut cfg = load_config(args.inputs.config.as_deref())?;
    if let Some(m) = args.metric {
        cfg.similarity_metric = m;
    }
    let items = load_fleet(&args.inputs.manifest)?;
    let scored = score_items(&items, &cfg.scoring_context())?;
    match &args.inputs.out_dir {
        Some(dir) => {
            for r in write_scored(dir, &scored)? {
                info!("{}: spr {:.6e}", r.criterion, r.spr);
            }
        }
        None => stdout_bytes(&to_csv_bytes(&build_leaderboard(&scored, Criterion::MinEosl)?))?,
    }
    Ok(())
}

/// One criterion's SPR in one round.
#[derive(Debug, Clone, Serialize)]
struct RoundSpr {
    round: usize,
    #[serde(flatten)]
    report: SprReport,
}

impl ReportRow for RoundSpr {
    fn columns() -> &'static [&'static str] {
        &["round", "criterion", "sample_size", "mean_similarity", "mean_energy_j", "spr"]
    }

    fn cells(&self) -> Vec<Cell> {
        let mut cells = vec![Cell::Int(self.round as u64)];
        cells.extend(self.report.cells());
        cells
    }
}

fn cumulative_params(args: &RoundsArgs, cfg: &RunConfig) -> Result<CumulativeParams, CliError> {
    Ok(match (args.alpha, args.beta) {
        (Some(a), Some(b)) => CumulativeParams::new(a, b)?,
        (Some(a), None) => CumulativeParams::from_alpha(a)?,
        (None, Some(b)) => CumulativeParams::new(1.0 - b, b)?,
        (None, None) => cfg.cumulative,
    })
}

pub fn rounds(args: &RoundsArgs) -> Result<(), CliError> {
    let mut cfg = load_config(args.inputs.config.as_deref())?;
    if let Some(m) = args.metric {
        cfg.similarity_metric = m;
    }
    let sizes = args.rounds.clone().unwrap_or_else(|| cfg.round_sizes.clone());
    validate_round_sizes(&sizes)?;
    let params = cumulative_params(args, &cfg)?;
    let resume = match &args.resume {
        Some(p) => Some(CumulativeStore::from_checkpoint(&load_checkpoint(p)?, Some(&params))?),
        None => None,
    };

    let items = load_fleet(&args.inputs.manifest)?;
    let out = run_rounds(&items, &sizes, &params, &cfg.scoring_context(), resume)?;

    let mut summary = Vec::new();
    for round in &out.rounds {
        summary.extend(round.spr.iter().map(|r| RoundSpr { round: round.round, report: r.clone() }));
    }
    let Some(dir) = &args.inputs.out_dir else {
        return stdout_bytes(&to_csv_bytes(&summary));
    };
    for round in &out.rounds {
        let sub = dir.join(format!("round_{}_n{}", round.round, round.sample_size));
        write_both(&sub, "scored", &flatten(&round.scored))?;
        for (c, board) in &round.boards {
            write_both(&sub, &format!("leaderboard_{c}"), board)?;
        }
        write_both(&sub, "spr", &round.spr)?;
        save_checkpoint(&sub.join("checkpoint.json"), &round.checkpoint)?;
    }
    write_both(dir, "spr_summary", &summary)?;
    if let Some(last) = out.rounds.last() {
        save_checkpoint(&dir.join("checkpoint.json"), &last.checkpoint)?;
    }
    info!("wrote {} rounds to {}", out.rounds.len(), dir.display());
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let grid = p_b_grid(args.pb_min, args.pb_max, args.points, args.log_scale)?;
    let profiles = match &args.lambda_grid {
        Some(text) => SweepProfile::parse_grid(text)?,
        None => default_profiles(),
    };
    let cfg = load_config(args.config.as_deref())?;
    let items = match &cfg.manifest {
        Some(m) => load_fleet(m)?,
        None => reference_items(),
    };
    let rows = run_sweep(&items, &cfg.scoring_context(), &grid, &profiles)?;
    match &args.out {
        Some(path) => write_report(&rows, ReportFormat::Csv, path)?,
        None => stdout_bytes(&to_csv_bytes(&rows))?,
    }
    Ok(())
}

pub fn spr_cmd(args: &SprArgs) -> Result<(), CliError> {
    let board: Vec<LeaderboardRow> = read_json_report(&args.board)?;
    let report = spr(&board)?;
    match &args.out {
        Some(path) => write_report(&[report], ReportFormat::Csv, path)?,
        None => stdout_bytes(&to_csv_bytes(&[report]))?,
    }
    Ok(())
}

pub fn validate(args: &ValidateArgs) -> Result<(), CliError> {
    let kind = validate_path(&args.path)?;
    stdout_bytes(format!("{}: valid {kind}\n", args.path.display()).as_bytes())
}
