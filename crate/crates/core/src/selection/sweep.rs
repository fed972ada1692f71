use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{score_items, EvaluationItem, ScoringContext, SelectionError};
use crate::eosl::{EoslError, EoslWeights};

/// One point of a bit-error sweep: a model's loss, averaged over items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: String,
    pub p_b: f64,
    pub lambda_profile: String,
    pub eosl: f64,
}

/// A named weight setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepProfile {
    pub label: String,
    pub weights: EoslWeights,
}

impl SweepProfile {
    pub fn new(weights: EoslWeights) -> Self {
        Self { label: weights.to_string(), weights }
    }

    /// Profiles separated by `;`, each in `sm=..,lch=..,ec=..,es=..` form.
    pub fn parse_grid(text: &str) -> Result<Vec<SweepProfile>, EoslError> {
        let profiles = text
            .split(';')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse().map(SweepProfile::new))
            .collect::<Result<Vec<_>, _>>()?;
        if profiles.is_empty() {
            return Err(EoslError::InvalidWeights("empty weight grid".into()));
        }
        Ok(profiles)
    }
}

/// Uniform weights plus one profile per term that zeroes or stresses it.
pub fn default_profiles() -> Vec<SweepProfile> {
    [
        "sm=1,lch=1,ec=1,es=1",
        "sm=1,lch=0,ec=1,es=1",
        "sm=1,lch=5,ec=1,es=1",
        "sm=5,lch=1,ec=1,es=1",
        "sm=1,lch=1,ec=1,es=5",
    ]
    .iter()
    .map(|s| SweepProfile::new(s.parse().expect("built-in profile")))
    .collect()
}

/// `points` bit-error probabilities from `min` to `max` inclusive, evenly
/// spaced or evenly spaced in log10.
pub fn p_b_grid(min: f64, max: f64, points: usize, log_scale: bool) -> Result<Vec<f64>, SelectionError> {
    let bad = |why: &str| Err(SelectionError::InvalidSweep(why.to_string()));
    if !(min.is_finite() && max.is_finite() && 0.0 <= min && min < max && max <= 0.5) {
        return bad("need 0 <= pb-min < pb-max <= 0.5");
    }
    if points < 2 {
        return bad("need at least 2 points");
    }
    if log_scale && min == 0.0 {
        return bad("log spacing needs pb-min > 0");
    }
    let last = (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points)
        .map(|i| {
            let f = i as f64 / last;
            if log_scale {
                10f64.powf(min.log10() + f * (max.log10() - min.log10()))
            } else {
                min + f * (max - min)
            }
        })
        .collect();
    grid[0] = min;
    grid[points - 1] = max;
    Ok(grid)
}

/// Score the fleet at every `(profile, p_b)` pair. Rows come out grouped by
/// profile, then `p_b`, then model id.
pub fn sweep(
    items: &[EvaluationItem],
    base: &ScoringContext,
    p_b_values: &[f64],
    profiles: &[SweepProfile],
) -> Result<Vec<SweepRow>, SelectionError> {
    if items.is_empty() {
        return Err(SelectionError::EmptyItemSet);
    }
    let mut rows = Vec::with_capacity(profiles.len() * p_b_values.len() * 5);
    for profile in profiles {
        for &p_b in p_b_values {
            let ctx = base.clone().with_weights(profile.weights).with_channel(base.channel.with_p_b(p_b)?);
            let mut sums: BTreeMap<String, f64> = BTreeMap::new();
            for item in score_items(items, &ctx)? {
                for row in item.rows {
                    *sums.entry(row.model_id).or_default() += row.eosl;
                }
            }
            let n = items.len() as f64;
            rows.extend(sums.into_iter().map(|(model, sum)| SweepRow {
                model,
                p_b,
                lambda_profile: profile.label.clone(),
                eosl: sum / n,
            }));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::EnergySummary;
    use crate::io::CandidateRecord;

    fn fleet() -> Vec<EvaluationItem> {
        let item = EvaluationItem::new("x", "a brown dog running")
            .with_candidate(CandidateRecord::new("a", "x", "a brown dog"), EnergySummary::new("a", "x", 10.0, 0.0))
            .with_candidate(CandidateRecord::new("b", "x", "a cat"), EnergySummary::new("b", "x", 20.0, 0.0));
        vec![item]
    }

    #[test]
    fn grids() {
        assert_eq!(p_b_grid(0.0, 0.5, 3, false).unwrap(), vec![0.0, 0.25, 0.5]);
        let g = p_b_grid(1e-5, 1e-1, 5, true).unwrap();
        assert_eq!((g[0], g[4]), (1e-5, 1e-1));
        assert!((g[2] - 1e-3).abs() < 1e-15);
        assert!(p_b_grid(0.1, 0.1, 3, false).is_err());
        assert!(p_b_grid(0.0, 0.6, 3, false).is_err());
        assert!(p_b_grid(0.0, 0.1, 1, false).is_err());
        assert!(p_b_grid(0.0, 0.1, 4, true).is_err());
    }

    #[test]
    fn grid_parsing() {
        let p = SweepProfile::parse_grid("sm=1,lch=0 ; es=2").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1].weights, EoslWeights::new(1.0, 1.0, 1.0, 2.0).unwrap());
        assert!(SweepProfile::parse_grid(" ; ").is_err());
        assert!(SweepProfile::parse_grid("sm=0,lch=0,ec=0,es=0").is_err());
    }

    #[test]
    fn lch_zero_is_flat_and_positive_is_monotone() {
        let grid = p_b_grid(1e-5, 0.1, 20, true).unwrap();
        let profiles = SweepProfile::parse_grid("sm=1,lch=0,ec=1,es=1;sm=1,lch=1,ec=1,es=1").unwrap();
        let rows = sweep(&fleet(), &ScoringContext::default(), &grid, &profiles).unwrap();
        assert_eq!(rows.len(), 2 * 20 * 2);
        for profile in &profiles {
            for model in ["a", "b"] {
                let v: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.model == model && r.lambda_profile == profile.label)
                    .map(|r| r.eosl)
                    .collect();
                if profile.weights.lch == 0.0 {
                    assert!(v.iter().all(|x| *x == v[0]));
                } else {
                    assert!(v.windows(2).all(|w| w[0] <= w[1]));
                    assert!(v[19] > v[0]);
                }
            }
        }
    }
}
