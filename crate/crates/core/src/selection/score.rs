use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EvaluationItem, ScoringContext, SelectionError};
use crate::channel::{message_bits, message_comm_energy, message_loss, packet_count};
use crate::eosl::{eosl_evaluate, EoslConfig, ResampledNoise, SingleObservation, TermInputs, TermMode, TermSource};
use crate::metrics::{
    bleu_score, cosine_similarity, jaccard_similarity, semantic_noise, ssim, text_cosine_similarity, Metric,
    MetricError, SimilarityScore, SsimParams,
};

/// One model's scored answer to one item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRow {
    pub item_id: String,
    pub model_id: String,
    /// Similarity clamped to `[0, 1]`.
    pub similarity: f64,
    pub noise: f64,
    pub channel_loss: f64,
    pub comm_energy_j: f64,
    pub ec_ratio: f64,
    pub energy_j: f64,
    pub es_ratio: f64,
    /// Loss of this item alone.
    pub eosl: f64,
    /// Loss used for ranking; differs from `eosl` once history is blended in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blended_eosl: Option<f64>,
    #[serde(default = "one")]
    pub rounds_used: usize,
    #[serde(default = "yes")]
    pub converged: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl ScoredRow {
    pub fn selection_eosl(&self) -> f64 {
        self.blended_eosl.unwrap_or(self.eosl)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem {
    pub item_id: String,
    /// Sorted by model id.
    pub rows: Vec<ScoredRow>,
}

fn similarity_of(item: &EvaluationItem, model: &str, ctx: &ScoringContext) -> Result<SimilarityScore, SelectionError> {
    let cand = &item.candidates[model];
    let wrap = |source: MetricError| SelectionError::Metric { item: item.item_id.clone(), source };
    let caption = &cand.record.caption;
    match ctx.metric {
        Metric::Cosine => match (&item.reference_embedding, &cand.record.embedding) {
            (Some(r), Some(c)) => cosine_similarity(r, c).map_err(wrap),
            _ => text_cosine_similarity(&item.reference_text, caption).map_err(wrap),
        },
        Metric::Ssim => {
            let missing = || SelectionError::MissingImage { item: item.item_id.clone(), model: model.to_string() };
            let reference = item.reference_image.as_ref().ok_or_else(missing)?;
            let decoded = cand.image.as_ref().ok_or_else(missing)?;
            let params = SsimParams::for_range(reference.dynamic_range()).with_window(ctx.ssim_window);
            ssim(reference, decoded, &params).map_err(wrap)
        }
        Metric::Bleu => bleu_score(caption, &item.reference_text, ctx.bleu).map_err(wrap),
        Metric::Jaccard => jaccard_similarity(&item.reference_text, caption).map_err(wrap),
    }
}

/// FNV-1a, stable across platforms and toolchains.
fn stream_seed(seed: u64, item: &str, model: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in item.bytes().chain([0u8]).chain(model.bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn ratio(value: f64, max: f64) -> f64 {
    if max > 0.0 {
        (value / max).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Score every model on one item. Energy ratios are normalized over this
/// item's fleet.
pub fn score_item(item: &EvaluationItem, ctx: &ScoringContext) -> Result<ScoredItem, SelectionError> {
    let missing =
        |model: &str| SelectionError::MissingCandidate { item: item.item_id.clone(), model: model.to_string() };
    if let Some(m) = item.candidates.keys().find(|m| !item.energies.contains_key(*m)) {
        return Err(missing(m));
    }
    if let Some(m) = item.energies.keys().find(|m| !item.candidates.contains_key(*m)) {
        return Err(missing(m));
    }
    if item.candidates.is_empty() {
        return Err(SelectionError::EmptyItemSet);
    }

    struct Partial {
        model: String,
        similarity: f64,
        noise: f64,
        loss: f64,
        comm: f64,
        energy: f64,
    }

    let mut partials = Vec::with_capacity(item.candidates.len());
    for (model, cand) in &item.candidates {
        let score = similarity_of(item, model, ctx)?;
        let bits = message_bits(&cand.record.caption);
        partials.push(Partial {
            model: model.clone(),
            similarity: score.clamped(),
            noise: semantic_noise(score),
            loss: message_loss(&ctx.channel, packet_count(bits, &ctx.channel)),
            comm: message_comm_energy(bits, &ctx.channel, &ctx.budget),
            energy: item.energies[model].total_energy,
        });
    }
    let comm_max = partials.iter().map(|p| p.comm).fold(0.0, f64::max);
    let energy_max = partials.iter().map(|p| p.energy).fold(0.0, f64::max);

    let rows = partials
        .into_iter()
        .map(|p| {
            let inputs = TermInputs {
                noise: p.noise,
                loss: p.loss,
                ec_ratio: ratio(p.comm, comm_max),
                es_ratio: ratio(p.energy, energy_max),
            };
            let (mut source, cfg): (Box<dyn TermSource>, EoslConfig) = match ctx.eosl.mode {
                TermMode::Ingest => {
                    (Box::new(SingleObservation(inputs)), EoslConfig { max_retransmissions: 1, ..ctx.eosl })
                }
                TermMode::Simulate { noise_jitter } => (
                    Box::new(ResampledNoise::new(inputs, noise_jitter, stream_seed(ctx.seed, &item.item_id, &p.model))),
                    ctx.eosl,
                ),
            };
            let result = eosl_evaluate(p.model.clone(), source.as_mut(), &cfg)?;
            Ok(ScoredRow {
                item_id: item.item_id.clone(),
                model_id: p.model,
                similarity: p.similarity,
                noise: p.noise,
                channel_loss: p.loss,
                comm_energy_j: p.comm,
                ec_ratio: inputs.ec_ratio,
                energy_j: p.energy,
                es_ratio: inputs.es_ratio,
                eosl: result.value,
                blended_eosl: None,
                rounds_used: result.rounds_used,
                converged: result.converged,
            })
        })
        .collect::<Result<Vec<_>, SelectionError>>()?;
    Ok(ScoredItem { item_id: item.item_id.clone(), rows })
}

/// Score items in parallel; output order follows input order.
pub fn score_items(items: &[EvaluationItem], ctx: &ScoringContext) -> Result<Vec<ScoredItem>, SelectionError> {
    items.par_iter().map(|item| score_item(item, ctx)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::EnergySummary;
    use crate::eosl::EoslWeights;
    use crate::io::CandidateRecord;
    use crate::metrics::EmbeddingVector;

    fn emb(xs: &[f64]) -> EmbeddingVector {
        EmbeddingVector::new(xs.to_vec()).unwrap()
    }

    /// Reference (1, 0); candidate (s, sqrt(1 - s^2)) has cosine s.
    fn fleet(entries: &[(&str, f64, f64)]) -> EvaluationItem {
        let mut item = EvaluationItem::new("img", "a dog");
        item.reference_embedding = Some(emb(&[1.0, 0.0]));
        for &(model, sim, joules) in entries {
            let mut rec = CandidateRecord::new(model, "img", "a dog");
            rec.embedding = Some(emb(&[sim, (1.0 - sim * sim).sqrt()]));
            item = item.with_candidate(rec, EnergySummary::new(model, "img", joules, 0.0));
        }
        item
    }

    #[test]
    fn single_model_fleet() {
        let scored = score_item(&fleet(&[("solo", 0.6, 12.0)]), &ScoringContext::default()).unwrap();
        assert_eq!(scored.rows.len(), 1);
        assert_eq!(scored.rows[0].es_ratio, 1.0);
        assert_eq!(scored.rows[0].ec_ratio, 1.0);
    }

    #[test]
    fn hand_evaluated_two_model_fleet() {
        let ctx = ScoringContext::default().with_weights(EoslWeights::new(1.0, 0.0, 0.0, 1.0).unwrap());
        let scored = score_item(&fleet(&[("A", 0.9, 100.0), ("B", 0.5, 10.0)]), &ctx).unwrap();
        let a = &scored.rows[0];
        let b = &scored.rows[1];
        assert!((a.eosl - 1.1).abs() < 1e-12, "{}", a.eosl);
        assert!((b.eosl - 0.6).abs() < 1e-12, "{}", b.eosl);
    }

    #[test]
    fn missing_energy_is_reported() {
        let mut item = fleet(&[("A", 0.9, 100.0), ("B", 0.5, 10.0)]);
        item.energies.remove("B");
        assert_eq!(
            score_item(&item, &ScoringContext::default()),
            Err(SelectionError::MissingCandidate { item: "img".into(), model: "B".into() })
        );
    }

    #[test]
    fn text_path_when_embeddings_absent() {
        let mut item = EvaluationItem::new("i", "a brown dog");
        for (model, caption) in [("x", "a brown cat"), ("y", "a brown dog")] {
            item = item
                .with_candidate(CandidateRecord::new(model, "i", caption), EnergySummary::new(model, "i", 1.0, 0.0));
        }
        let scored = score_item(&item, &ScoringContext::default()).unwrap();
        assert!((scored.rows[0].similarity - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(scored.rows[1].similarity, 1.0);
        let jac = score_item(&item, &ScoringContext::default().with_metric(Metric::Jaccard)).unwrap();
        assert_eq!(jac.rows[0].similarity, 0.5);
        let ssim = score_item(&item, &ScoringContext::default().with_metric(Metric::Ssim));
        assert!(matches!(ssim, Err(SelectionError::MissingImage { .. })));
    }

    #[test]
    fn simulation_mode_is_seeded() {
        let mut ctx = ScoringContext::default();
        ctx.eosl.mode = TermMode::Simulate { noise_jitter: 0.4 };
        ctx.eosl.noise_threshold = 0.1;
        let item = fleet(&[("A", 0.5, 3.0), ("B", 0.4, 2.0)]);
        let a = score_item(&item, &ctx).unwrap();
        let b = score_item(&item, &ctx).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.iter().any(|r| r.rounds_used > 1));
    }
}
