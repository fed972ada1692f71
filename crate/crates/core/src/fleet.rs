//! The five-encoder captioning fleet measured on a single dog photo, used as
//! the default sweep fleet and as a fixture.

use crate::energy::EnergySummary;
use crate::io::CandidateRecord;
use crate::metrics::EmbeddingVector;
use crate::selection::EvaluationItem;

pub const REFERENCE_ITEM: &str = "dog.jpg";
pub const REFERENCE_TEXT: &str = "a brown dog running through grassy field";

/// One encoder's measured run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FleetEntry {
    pub model_id: &'static str,
    pub caption: &'static str,
    pub cpu_j: f64,
    pub gpu_j: f64,
    /// Summed per-second CPU utilization over the run.
    pub cpu_util_pct: f64,
    pub noise: f64,
}

pub const REFERENCE_FLEET: [FleetEntry; 5] = [
    FleetEntry {
        model_id: "vit-gpt2",
        caption: "a brown dog running through a field",
        cpu_j: 50.701,
        gpu_j: 0.002,
        cpu_util_pct: 571.9,
        noise: 0.255,
    },
    FleetEntry {
        model_id: "blip-base",
        caption: "there is a picture on the wall",
        cpu_j: 60.922,
        gpu_j: 0.001,
        cpu_util_pct: 513.4,
        noise: 1.0,
    },
    FleetEntry {
        model_id: "git-base",
        caption: "a dog running in the grass",
        cpu_j: 197.442,
        gpu_j: 0.0,
        cpu_util_pct: 1456.1,
        noise: 0.27,
    },
    FleetEntry {
        model_id: "blip-large",
        caption: "there is a dog that is standing outside",
        cpu_j: 105.095,
        gpu_j: 0.0,
        cpu_util_pct: 746.3,
        noise: 0.635,
    },
    FleetEntry {
        model_id: "git-large",
        caption: "a brown and white dog in the grass",
        cpu_j: 524.718,
        gpu_j: 0.001,
        cpu_util_pct: 3669.9,
        noise: 0.484,
    },
];

/// Unit vector at cosine `s` from `(1, 0)`.
pub fn embedding_at_similarity(s: f64) -> EmbeddingVector {
    let s = s.clamp(-1.0, 1.0);
    EmbeddingVector::new(vec![s, (1.0 - s * s).max(0.0).sqrt()]).expect("unit vector is valid")
}

pub fn reference_embedding() -> EmbeddingVector {
    EmbeddingVector::new(vec![1.0, 0.0]).expect("unit vector is valid")
}

impl FleetEntry {
    pub fn record(&self) -> CandidateRecord {
        let mut rec = CandidateRecord::new(self.model_id, REFERENCE_ITEM, self.caption);
        rec.embedding = Some(embedding_at_similarity(1.0 - self.noise));
        rec
    }

    pub fn summary(&self) -> EnergySummary {
        EnergySummary::new(self.model_id, REFERENCE_ITEM, self.cpu_j, self.gpu_j)
    }
}

/// The fleet as a single evaluation item. Embeddings are placed so that
/// cosine similarity reproduces the measured noise.
pub fn reference_items() -> Vec<EvaluationItem> {
    let mut item = EvaluationItem::new(REFERENCE_ITEM, REFERENCE_TEXT);
    item.reference_embedding = Some(reference_embedding());
    for e in &REFERENCE_FLEET {
        item = item.with_candidate(e.record(), e.summary());
    }
    vec![item]
}
