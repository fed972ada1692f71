use std::collections::{BTreeMap, BTreeSet};

use super::cosine::cosine_raw;
use super::{Metric, MetricError, SimilarityScore};

/// Lowercased word tokens. Splits on Unicode whitespace and drops every
/// non-alphanumeric character; tokens that end up empty are discarded.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect::<String>())
        .filter(|w| !w.is_empty())
        .collect()
}

pub(crate) fn tokens_nonempty(text: &str) -> Result<Vec<String>, MetricError> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        Err(MetricError::EmptyText)
    } else {
        Ok(tokens)
    }
}

/// Cosine over raw term-frequency vectors built on the union vocabulary.
pub fn text_cosine_similarity(a: &str, b: &str) -> Result<SimilarityScore, MetricError> {
    let ta = tokens_nonempty(a)?;
    let tb = tokens_nonempty(b)?;

    let mut counts: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for t in &ta {
        counts.entry(t.as_str()).or_default().0 += 1.0;
    }
    for t in &tb {
        counts.entry(t.as_str()).or_default().1 += 1.0;
    }
    let (va, vb): (Vec<f64>, Vec<f64>) = counts.into_values().unzip();
    Ok(SimilarityScore::new(cosine_raw(&va, &vb), Metric::Cosine))
}

/// |A ∩ B| / |A ∪ B| over token sets.
pub fn jaccard_similarity(a: &str, b: &str) -> Result<SimilarityScore, MetricError> {
    let sa: BTreeSet<String> = tokens_nonempty(a)?.into_iter().collect();
    let sb: BTreeSet<String> = tokens_nonempty(b)?.into_iter().collect();
    let inter = sa.intersection(&sb).count();
    let union = sa.union(&sb).count();
    Ok(SimilarityScore::new(inter as f64 / union as f64, Metric::Jaccard))
}
