use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::text::tokens_nonempty;
use super::{Metric, MetricError, SimilarityScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BleuParams {
    pub max_n: usize,
    /// Add one to the numerator and denominator of every n-gram precision.
    pub smoothing: bool,
}

impl Default for BleuParams {
    fn default() -> Self {
        Self { max_n: 4, smoothing: false }
    }
}

impl BleuParams {
    pub fn with_max_n(max_n: usize) -> Self {
        Self { max_n, ..Self::default() }
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Sentence-level BLEU with uniform weights and brevity penalty.
///
/// Orders above the candidate length are skipped, so a one-word caption
/// identical to its reference still scores 1.
pub fn bleu_score(candidate: &str, reference: &str, params: BleuParams) -> Result<SimilarityScore, MetricError> {
    if params.max_n == 0 {
        return Err(MetricError::InvalidParameter("bleu max_n must be >= 1".into()));
    }
    let cand = tokens_nonempty(candidate)?;
    let refr = tokens_nonempty(reference)?;
    let order = params.max_n.min(cand.len());

    let mut log_sum = 0.0;
    for n in 1..=order {
        let cand_counts = ngram_counts(&cand, n);
        let ref_counts = ngram_counts(&refr, n);
        let total: usize = cand_counts.values().sum();
        let matched: usize =
            cand_counts.iter().map(|(gram, &c)| c.min(ref_counts.get(gram).copied().unwrap_or(0))).sum();
        let (num, den) =
            if params.smoothing { (matched as f64 + 1.0, total as f64 + 1.0) } else { (matched as f64, total as f64) };
        if num == 0.0 {
            return Ok(SimilarityScore::new(0.0, Metric::Bleu));
        }
        log_sum += (num / den).ln();
    }

    let c = cand.len() as f64;
    let r = refr.len() as f64;
    let log_bp = if c > r { 0.0 } else { 1.0 - r / c };
    let value = (log_sum / order as f64 + log_bp).exp();
    Ok(SimilarityScore::new(value.min(1.0), Metric::Bleu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let p1 = BleuParams::with_max_n(1);
        assert_eq!(
            bleu_score("a brown dog in grass", "a brown dog in grass", BleuParams::default()).unwrap().value,
            1.0
        );
        assert_eq!(bleu_score("the the the", "a cat sat", p1).unwrap().value, 0.0);
        let v = bleu_score("the cat", "the cat sat", p1).unwrap().value;
        assert!((v - (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn clipping_limits_repeated_words() {
        // "the" appears once in the reference, so only one of seven counts.
        let v = bleu_score("the the the the the the the", "the cat is on the mat", BleuParams::with_max_n(1))
            .unwrap()
            .value;
        assert!((v - 2.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn short_identical_caption_scores_one() {
        assert_eq!(bleu_score("rose", "rose", BleuParams::default()).unwrap().value, 1.0);
    }

    #[test]
    fn smoothing_avoids_zero() {
        let p = BleuParams { max_n: 2, smoothing: true };
        let v = bleu_score("the the the", "a cat sat", p).unwrap().value;
        // p1 = 1/4, p2 = 1/3, BP = 1
        assert!((v - (0.25f64 * (1.0 / 3.0)).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert_eq!(bleu_score("", "x", BleuParams::default()), Err(MetricError::EmptyText));
        assert!(bleu_score("x", "x", BleuParams::with_max_n(0)).is_err());
    }

    proptest! {
        #[test]
        fn bounded_and_case_invariant(a in prop::collection::vec("[a-d]{1,2}", 1..10),
                                      b in prop::collection::vec("[a-d]{1,2}", 1..10),
                                      n in 1usize..5, smoothing: bool) {
            let p = BleuParams { max_n: n, smoothing };
            let (a, b) = (a.join(" "), b.join(" "));
            let v = bleu_score(&a, &b, p).unwrap().value;
            prop_assert!((0.0..=1.0).contains(&v));
            let shouted = format!("  {}\t", a.to_uppercase());
            prop_assert_eq!(v, bleu_score(&shouted, &b, p).unwrap().value);
        }
    }
}
