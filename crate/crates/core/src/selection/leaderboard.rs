use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ScoredItem, ScoredRow, SelectionError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    MinEosl,
    MinPower,
    MaxSimilarity,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::MinEosl, Criterion::MinPower, Criterion::MaxSimilarity];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::MinEosl => "min_eosl",
            Criterion::MinPower => "min_power",
            Criterion::MaxSimilarity => "max_similarity",
        }
    }

    /// Better rows sort first; ties go to the smaller model id.
    fn compare(self, a: &ScoredRow, b: &ScoredRow) -> Ordering {
        let primary = match self {
            Criterion::MinEosl => a.selection_eosl().total_cmp(&b.selection_eosl()),
            Criterion::MinPower => a.energy_j.total_cmp(&b.energy_j),
            Criterion::MaxSimilarity => b.similarity.total_cmp(&a.similarity),
        };
        primary.then_with(|| a.model_id.cmp(&b.model_id))
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Criterion::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown criterion `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub item_id: String,
    pub winner: String,
    pub criterion: Criterion,
    /// The loss the winner was ranked by (blended once history exists).
    pub eosl: f64,
    pub energy_j: f64,
    pub similarity: f64,
}

/// One winner per item under `criterion`.
pub fn build_leaderboard(items: &[ScoredItem], criterion: Criterion) -> Result<Vec<LeaderboardRow>, SelectionError> {
    if items.is_empty() {
        return Err(SelectionError::EmptyItemSet);
    }
    items
        .iter()
        .map(|item| {
            let best = item.rows.iter().min_by(|a, b| criterion.compare(a, b)).ok_or(SelectionError::EmptyItemSet)?;
            Ok(LeaderboardRow {
                item_id: item.item_id.clone(),
                winner: best.model_id.clone(),
                criterion,
                eosl: best.selection_eosl(),
                energy_j: best.energy_j,
                similarity: best.similarity,
            })
        })
        .collect()
}

/// Whether two boards pick the same winner for every item, in order.
pub fn same_winners(a: &[LeaderboardRow], b: &[LeaderboardRow]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.item_id == y.item_id && x.winner == y.winner && x.energy_j == y.energy_j && x.similarity == y.similarity
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SprReport {
    pub criterion: Criterion,
    pub sample_size: usize,
    pub mean_similarity: f64,
    pub mean_energy_j: f64,
    pub spr: f64,
}

/// Mean winner similarity over mean winner energy.
pub fn spr(board: &[LeaderboardRow]) -> Result<SprReport, SelectionError> {
    let first = board.first().ok_or(SelectionError::EmptyItemSet)?;
    if let Some(row) = board.iter().find(|r| r.energy_j.is_nan() || r.energy_j <= 0.0) {
        return Err(SelectionError::ZeroEnergy(row.item_id.clone()));
    }
    let n = board.len() as f64;
    let mean_similarity = board.iter().map(|r| r.similarity).sum::<f64>() / n;
    let mean_energy_j = board.iter().map(|r| r.energy_j).sum::<f64>() / n;
    Ok(SprReport {
        criterion: first.criterion,
        sample_size: board.len(),
        mean_similarity,
        mean_energy_j,
        spr: mean_similarity / mean_energy_j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(model: &str, eosl: f64, energy: f64, sim: f64) -> ScoredRow {
        ScoredRow {
            item_id: "i".into(),
            model_id: model.into(),
            similarity: sim,
            noise: 1.0 - sim,
            channel_loss: 0.0,
            comm_energy_j: 0.0,
            ec_ratio: 0.0,
            energy_j: energy,
            es_ratio: 0.0,
            eosl,
            blended_eosl: None,
            rounds_used: 1,
            converged: true,
        }
    }

    fn board_row(sim: f64, energy: f64) -> LeaderboardRow {
        LeaderboardRow {
            item_id: "i".into(),
            winner: "m".into(),
            criterion: Criterion::MinEosl,
            eosl: 0.0,
            energy_j: energy,
            similarity: sim,
        }
    }

    #[test]
    fn ties_go_to_smallest_model_id() {
        let item =
            ScoredItem { item_id: "i".into(), rows: vec![row("zeta", 0.5, 5.0, 0.5), row("alpha", 0.5, 5.0, 0.5)] };
        for c in Criterion::ALL {
            assert_eq!(build_leaderboard(std::slice::from_ref(&item), c).unwrap()[0].winner, "alpha");
        }
    }

    #[test]
    fn min_power_picks_cheapest() {
        let item = ScoredItem { item_id: "i".into(), rows: vec![row("a", 0.1, 5.0, 0.9), row("b", 0.9, 3.0, 0.1)] };
        let board = build_leaderboard(std::slice::from_ref(&item), Criterion::MinPower).unwrap();
        assert_eq!(board[0].winner, "b");
        assert_eq!(build_leaderboard(std::slice::from_ref(&item), Criterion::MinEosl).unwrap()[0].winner, "a");
        assert_eq!(build_leaderboard(&[item], Criterion::MaxSimilarity).unwrap()[0].winner, "a");
    }

    #[test]
    fn blended_eosl_drives_selection() {
        let mut a = row("a", 0.2, 1.0, 0.5);
        a.blended_eosl = Some(0.9);
        let item = ScoredItem { item_id: "i".into(), rows: vec![a, row("b", 0.5, 1.0, 0.5)] };
        let board = build_leaderboard(&[item], Criterion::MinEosl).unwrap();
        assert_eq!((board[0].winner.as_str(), board[0].eosl), ("b", 0.5));
    }

    #[test]
    fn empty_input_rejected() {
        assert_eq!(build_leaderboard(&[], Criterion::MinEosl), Err(SelectionError::EmptyItemSet));
        assert_eq!(spr(&[]), Err(SelectionError::EmptyItemSet));
    }

    #[test]
    fn spr_examples() {
        let r = spr(&[board_row(0.4, 40.0), board_row(0.6, 60.0)]).unwrap();
        assert!((r.spr - 0.01).abs() < 1e-15);
        let single = spr(&[board_row(0.3, 7.0)]).unwrap();
        assert_eq!(single.spr, 0.3 / 7.0);
        assert!(matches!(spr(&[board_row(0.3, 0.0)]), Err(SelectionError::ZeroEnergy(_))));
    }

    #[test]
    fn criterion_names() {
        for c in Criterion::ALL {
            assert_eq!(c.as_str().parse::<Criterion>().unwrap(), c);
        }
    }
}
