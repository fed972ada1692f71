//! Fixture builders shared by the benchmarks.

use eosl_core::selection::EvaluationItem;
use eosl_core::synthetic::SyntheticSpec;

/// The five-model captioning fleet over `items` items (at most 100).
pub fn captioning_items(items: usize) -> Vec<EvaluationItem> {
    let mut all = SyntheticSpec::captioning_fleet(1).generate().items;
    all.truncate(items);
    all
}

/// A randomized fleet of 2 to 6 models.
pub fn random_items(seed: u64, items: usize) -> Vec<EvaluationItem> {
    SyntheticSpec::random(seed, items).generate().items
}
