use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    build_leaderboard, score_items, spr, validate_round_sizes, Criterion, EvaluationItem, LeaderboardRow, ScoredItem,
    ScoringContext, SelectionError, SprReport,
};
use crate::metalearn::{Checkpoint, CumulativeParams, CumulativeStore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    /// 1-based.
    pub round: usize,
    pub sample_size: usize,
    pub scored: Vec<ScoredItem>,
    pub boards: BTreeMap<Criterion, Vec<LeaderboardRow>>,
    pub spr: Vec<SprReport>,
    /// Cumulative state after this round's update.
    pub checkpoint: Checkpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundsOutput {
    pub rounds: Vec<RoundReport>,
}

/// Evaluate growing prefixes of `items`.
///
/// Round `k` ranks the first `round_sizes[k]` items. From the second round on,
/// each item's loss is blended with the model's cumulative loss from earlier
/// rounds before winners are picked. At the end of a round every model's
/// cumulative state absorbs the mean raw loss over the items that round added.
pub fn run_rounds(
    items: &[EvaluationItem],
    round_sizes: &[usize],
    params: &CumulativeParams,
    ctx: &ScoringContext,
    resume: Option<CumulativeStore>,
) -> Result<RoundsOutput, SelectionError> {
    validate_round_sizes(round_sizes)?;
    let needed = *round_sizes.last().expect("validated non-empty");
    if items.len() < needed {
        return Err(SelectionError::ManifestTooSmall { needed, available: items.len() });
    }
    let scored = score_items(&items[..needed], ctx)?;

    let mut store = resume.unwrap_or_default();
    let mut rounds = Vec::with_capacity(round_sizes.len());
    let mut prev_size = 0;
    for (index, &size) in round_sizes.iter().enumerate() {
        let prefix: Vec<ScoredItem> = scored[..size]
            .iter()
            .map(|item| {
                let mut item = item.clone();
                for row in &mut item.rows {
                    row.blended_eosl = store.blended(&row.model_id).map(|prior| params.blend(row.eosl, prior));
                }
                item
            })
            .collect();

        let mut boards = BTreeMap::new();
        let mut reports = Vec::with_capacity(Criterion::ALL.len());
        for criterion in Criterion::ALL {
            let board = build_leaderboard(&prefix, criterion)?;
            reports.push(spr(&board)?);
            boards.insert(criterion, board);
        }

        let mut sums: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
        for item in &scored[prev_size..size] {
            for row in &item.rows {
                let entry = sums.entry(row.model_id.as_str()).or_default();
                entry.0 += row.eosl;
                entry.1 += 1;
            }
        }
        for (model, (sum, count)) in sums {
            store.observe(model, sum / count as f64, params, false)?;
        }

        rounds.push(RoundReport {
            round: index + 1,
            sample_size: size,
            scored: prefix,
            boards,
            spr: reports,
            checkpoint: store.to_checkpoint(params),
        });
        prev_size = size;
    }
    Ok(RoundsOutput { rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::EnergySummary;
    use crate::io::CandidateRecord;
    use crate::metrics::EmbeddingVector;

    /// Items whose per-model (similarity, joules) come from `f(item_index, model)`.
    fn items(n: usize, models: &[&str], f: impl Fn(usize, &str) -> (f64, f64)) -> Vec<EvaluationItem> {
        (0..n)
            .map(|i| {
                let id = format!("{i:03}");
                let mut item = EvaluationItem::new(&id, "ref");
                item.reference_embedding = Some(EmbeddingVector::new(vec![1.0, 0.0]).unwrap());
                for &m in models {
                    let (s, e) = f(i, m);
                    let mut rec = CandidateRecord::new(m, &id, "caption");
                    rec.embedding = Some(EmbeddingVector::new(vec![s, (1.0 - s * s).sqrt()]).unwrap());
                    item = item.with_candidate(rec, EnergySummary::new(m, &id, e, 0.0));
                }
                item
            })
            .collect()
    }

    fn p(alpha: f64) -> CumulativeParams {
        CumulativeParams::from_alpha(alpha).unwrap()
    }

    #[test]
    fn first_round_uses_raw_losses() {
        let data = items(10, &["a", "b"], |i, m| if m == "a" { (0.5 + i as f64 * 0.01, 10.0) } else { (0.6, 20.0) });
        let out = run_rounds(&data, &[10], &p(0.7), &ScoringContext::default(), None).unwrap();
        let round = &out.rounds[0];
        assert!(round.scored.iter().flat_map(|i| &i.rows).all(|r| r.blended_eosl.is_none()));
        assert_eq!(round.checkpoint.entries.len(), 2);
        assert!(round.checkpoint.entries.iter().all(|e| e.n == 0));
        assert_eq!(round.boards[&Criterion::MinEosl].len(), 10);
    }

    #[test]
    fn degrading_model_blends_round_means() {
        // Model a is good for the first 5 items, poor afterwards.
        let data = items(12, &["a", "b"], |i, m| match (m, i < 5) {
            ("a", true) => (0.95, 10.0),
            ("a", false) => (0.2, 10.0),
            _ => (0.6, 10.0),
        });
        let ctx = ScoringContext::default();
        let out = run_rounds(&data, &[5, 12], &p(0.7), &ctx, None).unwrap();
        let raw = score_items(&data, &ctx).unwrap();
        let mean = |range: std::ops::Range<usize>| {
            let v: Vec<f64> = raw[range].iter().map(|it| it.rows[0].eosl).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let (e1, e2) = (mean(0..5), mean(5..12));
        let state = out.rounds[1].checkpoint.entries.iter().find(|e| e.key == "a").unwrap();
        assert!((state.blended - (0.7 * e2 + 0.3 * e1)).abs() < 1e-12);
        assert_eq!(state.n, 1);
        // Round 2 ranks with the round-1 history folded in.
        let row = &out.rounds[1].scored[7].rows[0];
        assert!((row.blended_eosl.unwrap() - (0.7 * row.eosl + 0.3 * e1)).abs() < 1e-12);
    }

    #[test]
    fn alpha_near_one_tracks_raw() {
        let data = items(20, &["a", "b", "c"], |i, m| {
            let s = 0.3 + 0.03 * ((i * 7 + m.len() * 3) % 20) as f64;
            (s, 5.0 + (i % 4) as f64)
        });
        let out = run_rounds(&data, &[10, 20], &p(0.99), &ScoringContext::default(), None).unwrap();
        for row in out.rounds[1].scored.iter().flat_map(|i| &i.rows) {
            let blended = row.blended_eosl.unwrap();
            assert!((blended - row.eosl).abs() <= 0.01 * row.eosl, "{blended} vs {}", row.eosl);
        }
    }

    #[test]
    fn rejects_bad_round_plans() {
        let data = items(5, &["a"], |_, _| (0.5, 1.0));
        let ctx = ScoringContext::default();
        assert!(matches!(
            run_rounds(&data, &[3, 10], &p(0.7), &ctx, None),
            Err(SelectionError::ManifestTooSmall { needed: 10, available: 5 })
        ));
        assert!(matches!(run_rounds(&data, &[3, 3], &p(0.7), &ctx, None), Err(SelectionError::InvalidRounds(_))));
        assert!(matches!(run_rounds(&data, &[], &p(0.7), &ctx, None), Err(SelectionError::InvalidRounds(_))));
    }

    #[test]
    fn deterministic() {
        let data = items(30, &["a", "b", "c", "d"], |i, m| {
            let h = (i * 31 + m.as_bytes()[0] as usize * 17) % 97;
            (h as f64 / 97.0, 1.0 + h as f64)
        });
        let ctx = ScoringContext::default();
        let a = run_rounds(&data, &[10, 20, 30], &p(0.7), &ctx, None).unwrap();
        let b = run_rounds(&data, &[10, 20, 30], &p(0.7), &ctx, None).unwrap();
        assert_eq!(a, b);
    }
}
