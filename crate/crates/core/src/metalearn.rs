//! Cumulative loss blending across rounds.
//!
//! `e'_0 = e_0` and `e'_n = α·e_n + β·e'_{n-1}` with `α + β = 1`, so
//! unrolling gives `e'_n = α·Σ_{i<n} e_{n-i}·β^i + e_0·β^n`. Older rounds fade
//! geometrically; nothing is optimized.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetaError {
    #[error("loss value {0} is negative or not finite")]
    NegativeLoss(f64),
    #[error("empty loss sequence")]
    EmptySequence,
    #[error("invalid cumulative params: {0}")]
    InvalidParams(String),
    #[error("checkpoint params (alpha={found_alpha}, beta={found_beta}) differ from run params")]
    ParamsMismatch { found_alpha: f64, found_beta: f64 },
}

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct CumulativeParams {
    alpha: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for CumulativeParams {
    type Error = MetaError;

    fn try_from(r: RawParams) -> Result<Self, Self::Error> {
        CumulativeParams::new(r.alpha, r.beta)
    }
}

impl From<CumulativeParams> for RawParams {
    fn from(p: CumulativeParams) -> Self {
        RawParams { alpha: p.alpha, beta: p.beta }
    }
}

impl Default for CumulativeParams {
    fn default() -> Self {
        Self { alpha: 0.7, beta: 0.3 }
    }
}

impl CumulativeParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, MetaError> {
        let open = |x: f64| x > 0.0 && x < 1.0;
        if !open(alpha) || !open(beta) {
            return Err(MetaError::InvalidParams(format!("alpha={alpha}, beta={beta} must lie in (0, 1)")));
        }
        if (alpha + beta - 1.0).abs() > SUM_TOLERANCE {
            return Err(MetaError::InvalidParams(format!("alpha + beta = {} != 1", alpha + beta)));
        }
        Ok(Self { alpha, beta })
    }

    /// Params from `alpha` alone, `beta = 1 - alpha`.
    pub fn from_alpha(alpha: f64) -> Result<Self, MetaError> {
        Self::new(alpha, 1.0 - alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Blend of a current value with the prior blended value.
    pub fn blend(&self, current: f64, prior: f64) -> f64 {
        current * self.alpha + prior * self.beta
    }
}

fn check_loss(e: f64) -> Result<f64, MetaError> {
    if e.is_finite() && e >= 0.0 {
        Ok(e)
    } else {
        Err(MetaError::NegativeLoss(e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeState {
    pub key: String,
    /// Index of the latest blended value `e'_n`; 0 right after `init`.
    pub n: u64,
    pub blended: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history: Option<Vec<f64>>,
}

impl CumulativeState {
    pub fn init(key: impl Into<String>, e0: f64) -> Result<Self, MetaError> {
        let e0 = check_loss(e0)?;
        Ok(Self { key: key.into(), n: 0, blended: e0, history: None })
    }

    /// Like [`CumulativeState::init`] but keeps every raw value for auditing.
    pub fn init_with_history(key: impl Into<String>, e0: f64) -> Result<Self, MetaError> {
        let mut s = Self::init(key, e0)?;
        s.history = Some(vec![e0]);
        Ok(s)
    }

    pub fn update(&self, e_n: f64, p: &CumulativeParams) -> Result<Self, MetaError> {
        let e_n = check_loss(e_n)?;
        let history = self.history.as_ref().map(|h| {
            let mut h = h.clone();
            h.push(e_n);
            h
        });
        Ok(Self { key: self.key.clone(), n: self.n + 1, blended: p.blend(e_n, self.blended), history })
    }

    /// Recompute `blended` from the retained history, if any.
    pub fn audit(&self, p: &CumulativeParams) -> Option<Result<f64, MetaError>> {
        self.history.as_deref().map(|h| closed_form(h, p))
    }
}

/// Direct evaluation of the unrolled recursion over `e_0..=e_n`.
pub fn closed_form(seq: &[f64], p: &CumulativeParams) -> Result<f64, MetaError> {
    let (&e0, _) = seq.split_first().ok_or(MetaError::EmptySequence)?;
    for &e in seq {
        check_loss(e)?;
    }
    let n = seq.len() - 1;
    let recent: f64 = (0..n).map(|i| seq[n - i] * p.beta.powi(i as i32)).sum();
    Ok(p.alpha * recent + e0 * p.beta.powi(n as i32))
}

/// One blended state per key, serializable as a checkpoint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CumulativeStore {
    entries: BTreeMap<String, CumulativeState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub alpha: f64,
    pub beta: f64,
    pub entries: Vec<CumulativeState>,
}

impl CumulativeStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &str) -> Option<&CumulativeState> {
        self.entries.get(key)
    }

    pub fn blended(&self, key: &str) -> Option<f64> {
        self.entries.get(key).map(|s| s.blended)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = &CumulativeState> {
        self.entries.values()
    }

    /// Seed an unseen key or fold a new value into an existing one.
    pub fn observe(&mut self, key: &str, e: f64, p: &CumulativeParams, keep_history: bool) -> Result<f64, MetaError> {
        let next = match self.entries.get(key) {
            Some(state) => state.update(e, p)?,
            None if keep_history => CumulativeState::init_with_history(key, e)?,
            None => CumulativeState::init(key, e)?,
        };
        let blended = next.blended;
        self.entries.insert(key.to_string(), next);
        Ok(blended)
    }

    pub fn to_checkpoint(&self, p: &CumulativeParams) -> Checkpoint {
        Checkpoint {
            format_version: crate::FORMAT_VERSION,
            alpha: p.alpha,
            beta: p.beta,
            entries: self.entries.values().cloned().collect(),
        }
    }

    pub fn from_checkpoint(cp: &Checkpoint, expected: Option<&CumulativeParams>) -> Result<Self, MetaError> {
        let params = CumulativeParams::new(cp.alpha, cp.beta)?;
        if let Some(exp) = expected {
            let close = |a: f64, b: f64| (a - b).abs() <= SUM_TOLERANCE;
            if !(close(exp.alpha, params.alpha) && close(exp.beta, params.beta)) {
                return Err(MetaError::ParamsMismatch { found_alpha: cp.alpha, found_beta: cp.beta });
            }
        }
        let mut entries = BTreeMap::new();
        for e in &cp.entries {
            check_loss(e.blended)?;
            entries.insert(e.key.clone(), e.clone());
        }
        Ok(Self { entries })
    }
}
