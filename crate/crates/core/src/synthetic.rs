//! Seeded synthetic fleets: per-item captions, embeddings and power traces
//! drawn from per-model quality and cost profiles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{aggregate_trace, EnergyTrace, PowerSample};
use crate::fleet::{embedding_at_similarity, reference_embedding};
use crate::io::CandidateRecord;
use crate::selection::EvaluationItem;

/// How one model behaves across the generated items.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelProfile {
    pub model_id: String,
    /// Mean similarity per context segment; the last entry repeats.
    pub similarity: Vec<f64>,
    /// Half-width of the uniform similarity noise.
    pub similarity_spread: f64,
    pub energy_mean_j: f64,
    /// Relative half-width of the uniform energy noise.
    pub energy_spread: f64,
}

impl ModelProfile {
    pub fn new(
        model_id: &str,
        similarity: &[f64],
        similarity_spread: f64,
        energy_mean_j: f64,
        energy_spread: f64,
    ) -> Self {
        Self {
            model_id: model_id.to_string(),
            similarity: similarity.to_vec(),
            similarity_spread,
            energy_mean_j,
            energy_spread,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub models: Vec<ModelProfile>,
    /// `(label, item count)` per context, in order.
    pub contexts: Vec<(String, usize)>,
}

/// A generated fleet in both raw-file and evaluation form.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticFleet {
    pub items: Vec<EvaluationItem>,
    pub records: Vec<CandidateRecord>,
    pub traces: Vec<EnergyTrace>,
}

const SUBJECTS: [(&str, &[&str]); 4] = [
    (
        "dog",
        &[
            "a brown dog running through grassy field",
            "a small dog sitting on a porch",
            "a dog catching a ball in the park",
        ],
    ),
    (
        "people-with-dogs",
        &[
            "a woman walking her dog on the beach",
            "a boy hugging a puppy on the couch",
            "a man throwing a stick for a dog",
        ],
    ),
    (
        "animal-interactions",
        &["a dog and a cat sleeping together", "two horses grazing near a barn", "a dog chasing ducks by a pond"],
    ),
    (
        "other-animals",
        &["a zebra standing in tall grass", "an owl perched on a branch", "a red fox crossing a snowy road"],
    ),
];

const FILLER: [&str; 6] = ["thing", "picture", "object", "view", "blur", "scene"];

impl SyntheticSpec {
    /// Five captioning encoders over 10/15/25/50 items of widening subject
    /// matter.
    pub fn captioning_fleet(seed: u64) -> Self {
        Self {
            seed,
            models: vec![
                ModelProfile::new("blip-base", &[0.42, 0.38, 0.34, 0.30], 0.18, 31.0, 0.3),
                ModelProfile::new("blip-large", &[0.46, 0.44, 0.42, 0.40], 0.18, 62.0, 0.2),
                ModelProfile::new("git-base", &[0.30, 0.30, 0.32, 0.34], 0.2, 45.0, 0.4),
                ModelProfile::new("git-large", &[0.50, 0.50, 0.48, 0.47], 0.15, 150.0, 0.2),
                ModelProfile::new("vit-gpt2", &[0.40, 0.36, 0.36, 0.34], 0.18, 47.0, 0.2),
            ],
            contexts: vec![
                ("dog".into(), 10),
                ("people-with-dogs".into(), 15),
                ("animal-interactions".into(), 25),
                ("other-animals".into(), 50),
            ],
        }
    }

    /// A fleet of 2 to 6 models with randomized profiles.
    pub fn random(seed: u64, items: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f1ee7);
        let count = rng.gen_range(2..=6);
        let models = (0..count)
            .map(|i| {
                let sim: Vec<f64> = (0..4).map(|_| rng.gen_range(0.1..0.9)).collect();
                ModelProfile::new(
                    &format!("m{i}"),
                    &sim,
                    rng.gen_range(0.0..0.3),
                    rng.gen_range(5.0..300.0),
                    rng.gen_range(0.0..0.5),
                )
            })
            .collect();
        Self { seed, models, contexts: vec![("mixed".into(), items)] }
    }

    pub fn item_count(&self) -> usize {
        self.contexts.iter().map(|c| c.1).sum()
    }

    pub fn generate(&self) -> SyntheticFleet {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut fleet = SyntheticFleet { items: Vec::new(), records: Vec::new(), traces: Vec::new() };
        let mut index = 0;
        for (segment, (label, count)) in self.contexts.iter().enumerate() {
            let phrases = SUBJECTS.iter().find(|(s, _)| s == label).map_or(SUBJECTS[0].1, |(_, p)| *p);
            for _ in 0..*count {
                index += 1;
                let item_id = format!("{index}.jpg");
                let reference = phrases[rng.gen_range(0..phrases.len())];
                let mut item = EvaluationItem::new(&item_id, reference);
                item.reference_embedding = Some(reference_embedding());
                item.context = Some(label.clone());
                for model in &self.models {
                    let mean = model.similarity[segment.min(model.similarity.len() - 1)];
                    let s = round4((mean + model.similarity_spread * rng.gen_range(-1.0..=1.0)).clamp(0.01, 0.99));
                    let mut record = CandidateRecord::new(&model.model_id, &item_id, garble(reference, s, &mut rng));
                    record.embedding = Some(embedding_at_similarity(s));
                    let joules = model.energy_mean_j * (1.0 + model.energy_spread * rng.gen_range(-1.0..=1.0));
                    let trace = power_trace(&model.model_id, &item_id, joules.max(0.5), &mut rng);
                    let summary = aggregate_trace(&trace).expect("generated traces are valid");
                    item = item.with_candidate(record.clone(), summary);
                    fleet.records.push(record);
                    fleet.traces.push(trace);
                }
                fleet.items.push(item);
            }
        }
        fleet
    }
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Keep each reference word with probability `s`, else swap in filler.
fn garble(reference: &str, s: f64, rng: &mut ChaCha8Rng) -> String {
    reference
        .split_whitespace()
        .map(|w| if rng.gen::<f64>() < s { w } else { FILLER[rng.gen_range(0..FILLER.len())] })
        .collect::<Vec<_>>()
        .join(" ")
}

/// One-second samples whose CPU powers sum to about `joules`, with a trickle
/// of GPU power, all rounded to milliwatts.
fn power_trace(model: &str, item: &str, joules: f64, rng: &mut ChaCha8Rng) -> EnergyTrace {
    let seconds = (joules / 12.0).ceil().max(1.0) as usize;
    let weights: Vec<f64> = (0..seconds).map(|_| rng.gen_range(0.6..1.4)).collect();
    let total: f64 = weights.iter().sum();
    let samples = weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let mut s = PowerSample::new(i as f64, round3(joules * w / total), round3(rng.gen_range(0.0..0.002)));
            s.cpu_util_pct = Some((rng.gen_range(60.0..160.0f64) * 10.0).round() / 10.0);
            s
        })
        .collect();
    EnergyTrace { model_id: model.into(), item_id: item.into(), sample_interval: 1.0, samples }
}

fn round3(x: f64) -> f64 {
    (x * 1e3).round() / 1e3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_shaped() {
        let spec = SyntheticSpec::captioning_fleet(7);
        let a = spec.generate();
        assert_eq!(a, spec.generate());
        assert_eq!(a.items.len(), 100);
        assert_eq!(a.records.len(), 500);
        assert_eq!(a.items[10].context.as_deref(), Some("people-with-dogs"));
        for t in &a.traces {
            t.validate().unwrap();
        }
        assert_ne!(a, SyntheticSpec::captioning_fleet(8).generate());
    }

    #[test]
    fn random_specs_vary() {
        let a = SyntheticSpec::random(1, 20);
        assert!((2..=6).contains(&a.models.len()));
        assert_eq!(a.generate().items.len(), 20);
    }
}
