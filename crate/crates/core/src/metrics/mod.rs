//! Semantic similarity between an intended and a perceived message.
//!
//! Every metric returns a [`SimilarityScore`]; [`semantic_noise`] turns a score
//! into the noise term consumed by the loss.

mod bleu;
mod cosine;
mod ssim;
mod text;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bleu::{bleu_score, BleuParams};
pub use cosine::{cosine_similarity, EmbeddingVector};
pub use ssim::{luma, ssim, GrayImage, SsimParams, SsimWindow};
pub use text::{jaccard_similarity, text_cosine_similarity, tokenize};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("text is empty after tokenization")]
    EmptyText,
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Which similarity function produced a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Cosine,
    Ssim,
    Bleu,
    Jaccard,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Cosine, Metric::Ssim, Metric::Bleu, Metric::Jaccard];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Cosine => "cosine",
            Metric::Ssim => "ssim",
            Metric::Bleu => "bleu",
            Metric::Jaccard => "jaccard",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cosine" => Ok(Metric::Cosine),
            "ssim" => Ok(Metric::Ssim),
            "bleu" => Ok(Metric::Bleu),
            "jaccard" => Ok(Metric::Jaccard),
            other => Err(MetricError::InvalidParameter(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub value: f64,
    pub metric: Metric,
}

impl SimilarityScore {
    pub fn new(value: f64, metric: Metric) -> Self {
        Self { value, metric }
    }

    /// The score restricted to `[0, 1]`; signed cosine values below zero map to 0.
    pub fn clamped(&self) -> f64 {
        clamp_unit(self.value)
    }
}

pub(crate) fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// Semantic noise `1 - S`, with `S` clamped to the unit interval first.
pub fn semantic_noise(score: SimilarityScore) -> f64 {
    1.0 - score.clamped()
}
