use serde::{Deserialize, Serialize};

use super::{Metric, MetricError, SimilarityScore};

/// A dense embedding. Serialized as a bare JSON array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self, MetricError> {
        if values.is_empty() {
            return Err(MetricError::InvalidParameter("embedding must have dim >= 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MetricError::InvalidParameter("embedding component is not finite".into()));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, k: f64) -> Result<Self, MetricError> {
        Self::new(self.0.iter().map(|v| v * k).collect())
    }
}

impl TryFrom<Vec<f64>> for EmbeddingVector {
    type Error = MetricError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

impl From<EmbeddingVector> for Vec<f64> {
    fn from(v: EmbeddingVector) -> Self {
        v.0
    }
}

pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<SimilarityScore, MetricError> {
    if a.dim() != b.dim() {
        return Err(MetricError::DimensionMismatch { left: a.dim().to_string(), right: b.dim().to_string() });
    }
    if a.is_zero() || b.is_zero() {
        return Err(MetricError::ZeroVector);
    }
    Ok(SimilarityScore::new(cosine_raw(a.values(), b.values()), Metric::Cosine))
}

/// Cosine of two equal-length, nonzero slices. Identical inputs give exactly 1.
pub(crate) fn cosine_raw(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|y| y * y).sum();
    // sqrt(na * nb) rather than sqrt(na) * sqrt(nb): when a == b this is
    // sqrt(na^2) == na exactly, so self-similarity is exactly 1.
    let value = dot / (na * nb).sqrt();
    value.clamp(-1.0, 1.0)
}
