use std::path::{Path, PathBuf};

use eosl_core::fleet::{reference_items, REFERENCE_FLEET};
use eosl_core::io::{
    load_checkpoint, load_items, load_manifest, read_json_report, save_checkpoint, to_csv_bytes, validate_path,
    write_report, DocumentKind, ReportFormat,
};
use eosl_core::selection::{build_leaderboard, run_rounds, score_items, spr, Criterion, ScoringContext};
use eosl_core::{CumulativeParams, CumulativeStore, LeaderboardRow, RunConfig};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn reference_fixture_matches_builtin_fleet() {
    let items = load_items(&load_manifest(&fixtures().join("reference/manifest.json")).unwrap()).unwrap();
    let ctx = ScoringContext::default();
    let from_disk = score_items(&items, &ctx).unwrap();
    let builtin = score_items(&reference_items(), &ctx).unwrap();
    for (a, b) in from_disk[0].rows.iter().zip(&builtin[0].rows) {
        assert_eq!(a.model_id, b.model_id);
        assert!((a.eosl - b.eosl).abs() < 1e-9, "{}: {} vs {}", a.model_id, a.eosl, b.eosl);
        assert!((a.energy_j - b.energy_j).abs() < 1e-9);
    }
    assert_eq!(from_disk[0].rows.len(), REFERENCE_FLEET.len());
}

#[test]
fn every_fixture_file_validates() {
    let root = fixtures();
    let cases = [
        ("config.default.json", DocumentKind::Config),
        ("reference/manifest.json", DocumentKind::Manifest),
        ("reference/traces/vit-gpt2.json", DocumentKind::Trace),
        ("reference/candidates/git-large.json", DocumentKind::Candidate),
        ("synthetic/manifest10.json", DocumentKind::Manifest),
        ("synthetic/traces/blip-base.json", DocumentKind::Trace),
        ("synthetic/candidates/vit-gpt2.json", DocumentKind::Candidate),
    ];
    for (file, kind) in cases {
        assert_eq!(validate_path(&root.join(file)).unwrap(), kind, "{file}");
    }
}

#[test]
fn default_config_file_matches_defaults() {
    assert_eq!(RunConfig::load(&fixtures().join("config.default.json")).unwrap(), RunConfig::default());
}

#[test]
fn initial_board_ratio() {
    let board: Vec<LeaderboardRow> = read_json_report(&fixtures().join("initial_leaderboard.json")).unwrap();
    let r = spr(&board).unwrap();
    assert_eq!(r.sample_size, 10);
    assert!((r.mean_similarity - 0.3682).abs() < 1e-12);
    assert!((r.mean_energy_j - 44.6747).abs() < 1e-12);
    assert!((r.spr - 0.3682 / 44.6747).abs() < 1e-15);
}

#[test]
fn rounds_resume_from_saved_checkpoint() {
    let items = load_items(&load_manifest(&fixtures().join("synthetic/manifest.json")).unwrap()).unwrap();
    let params = CumulativeParams::default();
    let ctx = ScoringContext::default();
    let full = run_rounds(&items, &[10, 25], &params, &ctx, None).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.json");
    let first = run_rounds(&items, &[10], &params, &ctx, None).unwrap();
    save_checkpoint(&path, &first.rounds[0].checkpoint).unwrap();
    let loaded = load_checkpoint(&path).unwrap();
    assert_eq!(loaded, first.rounds[0].checkpoint);

    // Resuming replays the same 25-item prefix against the saved history.
    let store = CumulativeStore::from_checkpoint(&loaded, Some(&params)).unwrap();
    let resumed = run_rounds(&items, &[25], &params, &ctx, Some(store)).unwrap();
    let a = &full.rounds[1].boards[&Criterion::MinEosl];
    let b = &resumed.rounds[0].boards[&Criterion::MinEosl];
    assert_eq!(a, b);
}

#[test]
fn report_files_round_trip() {
    let scored = score_items(&reference_items(), &ScoringContext::default()).unwrap();
    let board = build_leaderboard(&scored, Criterion::MinPower).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("board.json");
    write_report(&board, ReportFormat::Json, &json).unwrap();
    let back: Vec<LeaderboardRow> = read_json_report(&json).unwrap();
    assert_eq!(back[0].winner, board[0].winner);
    assert!((back[0].energy_j - board[0].energy_j).abs() <= 1e-5 * board[0].energy_j);

    let csv = String::from_utf8(to_csv_bytes(&board)).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("item_id,winner,eosl,energy_j,similarity\n"));
}
