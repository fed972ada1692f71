//! Regenerate the bundled fixtures.
//!
//! ```text
//! cargo run -p eosl-core --example make_fixtures -- fixtures
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use eosl_core::energy::{EnergyTrace, PowerSample};
use eosl_core::fleet::{reference_embedding, REFERENCE_FLEET, REFERENCE_ITEM, REFERENCE_TEXT};
use eosl_core::io::{load_items, load_manifest};
use eosl_core::selection::{run_rounds, Criterion, EvaluationItem, RoundsOutput};
use eosl_core::synthetic::SyntheticSpec;
use eosl_core::{CumulativeParams, RunConfig, FORMAT_VERSION};
use serde::Serialize;
use serde_json::{json, Value};

const ROUNDS: [usize; 4] = [10, 25, 50, 100];

fn write_json(path: &Path, value: &impl Serialize) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    let mut text = serde_json::to_string_pretty(value).unwrap();
    text.push('\n');
    fs::write(path, text).unwrap();
}

fn versioned(value: impl Serialize) -> Value {
    let mut v = serde_json::to_value(value).unwrap();
    v.as_object_mut().unwrap().insert("format_version".into(), json!(FORMAT_VERSION));
    v
}

/// Split `total` (three decimals) into `n` parts that add back exactly in
/// thousandths, shaped by a ramp.
fn split_milli(total: f64, n: usize) -> Vec<f64> {
    let milli = (total * 1000.0).round() as i64;
    let weights: Vec<i64> = (0..n as i64).map(|i| 8 + (i * 5) % 7).collect();
    let wsum: i64 = weights.iter().sum();
    let mut parts: Vec<i64> = weights.iter().map(|w| milli * w / wsum).collect();
    parts[0] += milli - parts.iter().sum::<i64>();
    parts.into_iter().map(|m| m as f64 / 1000.0).collect()
}

fn reference_fleet(dir: &Path) {
    let mut entries = Vec::new();
    for e in &REFERENCE_FLEET {
        let seconds = (e.cpu_j / 12.0).ceil() as usize;
        let cpu = split_milli(e.cpu_j, seconds);
        let gpu = split_milli(e.gpu_j, seconds);
        let util: Vec<f64> =
            split_milli(e.cpu_util_pct / 100.0, seconds).iter().map(|u| (u * 1000.0).round() / 10.0).collect();
        let samples = (0..seconds)
            .map(|i| PowerSample { t: i as f64, cpu_w: cpu[i], gpu_w: gpu[i], cpu_util_pct: Some(util[i]) })
            .collect();
        let trace =
            EnergyTrace { model_id: e.model_id.into(), item_id: REFERENCE_ITEM.into(), sample_interval: 1.0, samples };
        write_json(&dir.join(format!("traces/{}.json", e.model_id)), &versioned(&trace));
        write_json(&dir.join(format!("candidates/{}.json", e.model_id)), &versioned(e.record()));
        entries.push(json!({
            "model_id": e.model_id,
            "candidate": format!("candidates/{}.json", e.model_id),
            "trace": format!("traces/{}.json", e.model_id),
        }));
    }
    let manifest = json!({
        "format_version": FORMAT_VERSION,
        "name": "five captioning encoders on one photo",
        "items": [{
            "item_id": REFERENCE_ITEM,
            "reference_text": REFERENCE_TEXT,
            "reference_embedding": reference_embedding(),
            "candidates": entries,
        }],
    });
    write_json(&dir.join("manifest.json"), &manifest);
}

fn spr_of(out: &RoundsOutput, round: usize, c: Criterion) -> f64 {
    out.rounds[round].spr.iter().find(|r| r.criterion == c).unwrap().spr
}

/// Whether the min-loss board has the best similarity-to-power ratio in
/// every round.
fn eosl_leads(items: &[EvaluationItem], cfg: &RunConfig) -> bool {
    let out = run_rounds(items, &ROUNDS, &CumulativeParams::default(), &cfg.scoring_context(), None).unwrap();
    (0..ROUNDS.len()).all(|r| {
        let e = spr_of(&out, r, Criterion::MinEosl);
        e > spr_of(&out, r, Criterion::MaxSimilarity) && e > spr_of(&out, r, Criterion::MinPower)
    })
}

fn write_synthetic(dir: &Path, spec: &SyntheticSpec) {
    let fleet = spec.generate();
    let mut records: BTreeMap<&str, Vec<Value>> = BTreeMap::new();
    let mut traces: BTreeMap<&str, Vec<Value>> = BTreeMap::new();
    for r in &fleet.records {
        records.entry(&r.model_id).or_default().push(versioned(r));
    }
    for t in &fleet.traces {
        traces.entry(&t.model_id).or_default().push(versioned(t));
    }
    for (model, rows) in &records {
        write_json(&dir.join(format!("candidates/{model}.json")), rows);
    }
    for (model, rows) in &traces {
        write_json(&dir.join(format!("traces/{model}.json")), rows);
    }
    let item_json = |item: &EvaluationItem| {
        let candidates: Vec<Value> = item
            .models()
            .map(|m| json!({"model_id": m, "candidate": format!("candidates/{m}.json"), "trace": format!("traces/{m}.json")}))
            .collect();
        json!({
            "item_id": item.item_id,
            "reference_text": item.reference_text,
            "reference_embedding": item.reference_embedding,
            "context": item.context,
            "candidates": candidates,
        })
    };
    let all: Vec<Value> = fleet.items.iter().map(item_json).collect();
    write_json(
        &dir.join("manifest.json"),
        &json!({"format_version": FORMAT_VERSION, "name": format!("synthetic captioning fleet, seed {}", spec.seed), "items": all}),
    );
    write_json(
        &dir.join("manifest10.json"),
        &json!({"format_version": FORMAT_VERSION, "name": "first ten synthetic items", "items": all[..10]}),
    );
}

fn published(dir: &Path) {
    let board: Vec<Value> = [
        ("1.jpg", "blip-image-captioning-base", 0.7627, 41.5830, 0.4082),
        ("2.jpg", "blip-image-captioning-large", 1.1470, 65.8970, 0.5071),
        ("3.jpg", "blip-image-captioning-base", 0.6658, 32.2100, 0.4629),
        ("4.jpg", "blip-image-captioning-large", 1.1316, 58.9600, 0.1581),
        ("5.jpg", "blip-image-captioning-base", 0.7168, 30.1130, 0.3780),
        ("6.jpg", "vit-gpt2-image-captioning", 0.8568, 47.7020, 0.4000),
        ("7.jpg", "git-base-coco", 0.8960, 42.7010, 0.2357),
        ("8.jpg", "blip-image-captioning-base", 0.8975, 21.0200, 0.2500),
        ("9.jpg", "git-base-coco", 0.8795, 75.6270, 0.3780),
        ("10.jpg", "blip-image-captioning-base", 0.7016, 30.9340, 0.5040),
    ]
    .iter()
    .map(|(item, winner, eosl, energy, sim)| {
        json!({"item_id": item, "winner": winner, "criterion": "min_eosl", "eosl": eosl, "energy_j": energy, "similarity": sim})
    })
    .collect();
    write_json(&dir.join("initial_leaderboard.json"), &board);

    let table = |rows: [(usize, f64, f64, f64); 4]| -> Vec<Value> {
        rows.iter()
            .map(|(n, sim, power, eosl)| json!({"sample_size": n, "max_similarity": sim, "min_power": power, "min_eosl": eosl}))
            .collect()
    };
    write_json(
        &dir.join("published_spr.json"),
        &json!({
            "scale": 1e-3,
            "cosine": table([(10, 3.4926, 7.4946, 8.2417), (25, 4.9258, 6.9847, 8.5124), (50, 5.3902, 10.3514, 11.4882), (100, 4.6983, 10.3662, 10.8188)]),
            "bleu": table([(10, 1.5050, 1.9564, 2.0154), (25, 1.7493, 1.5118, 2.5305), (50, 1.4700, 1.5298, 2.0551), (100, 1.3072, 1.9014, 2.3925)]),
        }),
    );
}

fn main() {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    let cfg = RunConfig::default();
    write_json(&root.join("config.default.json"), &cfg);
    reference_fleet(&root.join("reference"));
    published(&root);

    let seed = (0..10_000u64)
        .find(|&s| eosl_leads(&SyntheticSpec::captioning_fleet(s).generate().items, &cfg))
        .expect("some seed satisfies the ordering");
    let dir = root.join("synthetic");
    write_synthetic(&dir, &SyntheticSpec::captioning_fleet(seed));

    // Confirm the files on disk, not just the in-memory fleet.
    let loaded = load_items(&load_manifest(&dir.join("manifest.json")).unwrap()).unwrap();
    assert!(eosl_leads(&loaded, &cfg), "fixture on disk lost the ordering");
    let reference = load_items(&load_manifest(&root.join("reference/manifest.json")).unwrap()).unwrap();
    for e in &REFERENCE_FLEET {
        let got = &reference[0].energies[e.model_id];
        assert!((got.cpu_energy - e.cpu_j).abs() < 1e-9 && (got.gpu_energy - e.gpu_j).abs() < 1e-9, "{}", e.model_id);
    }
    println!("synthetic fleet seed {seed}");
}
