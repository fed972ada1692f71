//! Energy-optimized semantic loss.
//!
//! One transmission round contributes
//! `λsm·N + λlch·L + λec·(Ec/Ec,max) + λes·(Es/Es,max)`; rounds repeat until the
//! semantic noise drops to the configured threshold or the retransmission cap
//! is hit, and the loss is the sum over executed rounds.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EoslError {
    #[error("component `{name}` = {value} outside [0, 1]")]
    ComponentOutOfRange { name: &'static str, value: f64 },
    #[error("term source exhausted at round {0}")]
    TermSourceExhausted(usize),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EoslWeights {
    pub sm: f64,
    pub lch: f64,
    pub ec: f64,
    pub es: f64,
}

impl Default for EoslWeights {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl EoslWeights {
    pub fn new(sm: f64, lch: f64, ec: f64, es: f64) -> Result<Self, EoslError> {
        let w = Self { sm, lch, ec, es };
        w.validate()?;
        Ok(w)
    }

    pub fn uniform(v: f64) -> Self {
        Self { sm: v, lch: v, ec: v, es: v }
    }

    pub fn validate(&self) -> Result<(), EoslError> {
        let all = [self.sm, self.lch, self.ec, self.es];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(EoslError::InvalidWeights(format!("{self}: weights must be finite and >= 0")));
        }
        if all.iter().all(|w| *w == 0.0) {
            return Err(EoslError::InvalidWeights("all weights are zero".into()));
        }
        Ok(())
    }
}

impl fmt::Display for EoslWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sm={},lch={},ec={},es={}", self.sm, self.lch, self.ec, self.es)
    }
}

impl FromStr for EoslWeights {
    type Err = EoslError;

    /// Parses `sm=1,lch=1,ec=1,es=1`. Omitted keys default to 1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut w = Self::uniform(1.0);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) =
                part.split_once('=').ok_or_else(|| EoslError::InvalidWeights(format!("`{part}` is not key=value")))?;
            let value: f64 =
                value.trim().parse().map_err(|_| EoslError::InvalidWeights(format!("`{value}` is not a number")))?;
            match key.trim() {
                "sm" => w.sm = value,
                "lch" => w.lch = value,
                "ec" => w.ec = value,
                "es" => w.es = value,
                other => return Err(EoslError::InvalidWeights(format!("unknown weight `{other}`"))),
            }
        }
        w.validate()?;
        Ok(w)
    }
}

impl Serialize for EoslWeights {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EoslWeights {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Fields {
                #[serde(default = "one")]
                sm: f64,
                #[serde(default = "one")]
                lch: f64,
                #[serde(default = "one")]
                ec: f64,
                #[serde(default = "one")]
                es: f64,
            },
        }
        fn one() -> f64 {
            1.0
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Fields { sm, lch, ec, es } => EoslWeights::new(sm, lch, ec, es).map_err(serde::de::Error::custom),
        }
    }
}

/// How per-round terms are produced.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum TermMode {
    /// One recorded observation per model and item; exactly one round.
    #[default]
    Ingest,
    /// Noise redrawn uniformly within `±noise_jitter` of the observation each
    /// round; channel and energy terms repeat their expected values.
    Simulate { noise_jitter: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EoslConfig {
    pub weights: EoslWeights,
    pub noise_threshold: f64,
    pub max_retransmissions: usize,
    pub mode: TermMode,
}

impl Default for EoslConfig {
    fn default() -> Self {
        Self { weights: EoslWeights::default(), noise_threshold: 0.3, max_retransmissions: 8, mode: TermMode::Ingest }
    }
}

impl EoslConfig {
    pub fn validate(&self) -> Result<(), EoslError> {
        self.weights.validate()?;
        if !(0.0..=1.0).contains(&self.noise_threshold) {
            return Err(EoslError::InvalidConfig {
                field: "noise_threshold",
                reason: format!("{} outside [0, 1]", self.noise_threshold),
            });
        }
        if self.max_retransmissions == 0 {
            return Err(EoslError::InvalidConfig { field: "max_retransmissions", reason: "must be >= 1".into() });
        }
        if let TermMode::Simulate { noise_jitter } = self.mode {
            if !(0.0..=1.0).contains(&noise_jitter) {
                return Err(EoslError::InvalidConfig { field: "mode.noise_jitter", reason: "outside [0, 1]".into() });
            }
        }
        Ok(())
    }
}

/// The four per-round components, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermInputs {
    pub noise: f64,
    pub loss: f64,
    pub ec_ratio: f64,
    pub es_ratio: f64,
}

impl TermInputs {
    fn check(&self) -> Result<(), EoslError> {
        for (name, value) in
            [("noise", self.noise), ("loss", self.loss), ("ec_ratio", self.ec_ratio), ("es_ratio", self.es_ratio)]
        {
            if !(0.0..=1.0).contains(&value) {
                return Err(EoslError::ComponentOutOfRange { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionTerm {
    pub j: usize,
    pub noise: f64,
    pub loss: f64,
    pub ec_ratio: f64,
    pub es_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EoslResult {
    pub model_id: String,
    pub value: f64,
    pub rounds_used: usize,
    pub terms: Vec<TransmissionTerm>,
    pub converged: bool,
}

impl EoslResult {
    /// Re-sum the stored terms under `weights`.
    pub fn recompute(&self, weights: &EoslWeights) -> f64 {
        self.terms.iter().map(|t| weighted(t.noise, t.loss, t.ec_ratio, t.es_ratio, weights)).sum()
    }

    /// Semantic noise of the last executed round.
    pub fn final_noise(&self) -> f64 {
        self.terms.last().map_or(1.0, |t| t.noise)
    }
}

fn weighted(noise: f64, loss: f64, ec: f64, es: f64, w: &EoslWeights) -> f64 {
    w.sm * noise + w.lch * loss + w.ec * ec + w.es * es
}

/// Loss of a single transmission round.
pub fn eosl_single(noise: f64, loss: f64, ec_ratio: f64, es_ratio: f64, w: &EoslWeights) -> Result<f64, EoslError> {
    TermInputs { noise, loss, ec_ratio, es_ratio }.check()?;
    Ok(weighted(noise, loss, ec_ratio, es_ratio, w))
}

/// Supplies the components of round `j` (1-based).
pub trait TermSource {
    fn term(&mut self, j: usize) -> Option<TermInputs>;
}

/// Recorded data: a single round and nothing more.
#[derive(Debug, Clone, Copy)]
pub struct SingleObservation(pub TermInputs);

impl TermSource for SingleObservation {
    fn term(&mut self, j: usize) -> Option<TermInputs> {
        (j == 1).then_some(self.0)
    }
}

/// The same expected components every round.
#[derive(Debug, Clone, Copy)]
pub struct RepeatedTerms(pub TermInputs);

impl TermSource for RepeatedTerms {
    fn term(&mut self, _j: usize) -> Option<TermInputs> {
        Some(self.0)
    }
}

/// Round 1 is the observation; later rounds redraw the noise around it.
#[derive(Debug, Clone)]
pub struct ResampledNoise {
    base: TermInputs,
    jitter: f64,
    rng: ChaCha8Rng,
}

impl ResampledNoise {
    pub fn new(base: TermInputs, jitter: f64, seed: u64) -> Self {
        Self { base, jitter, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl TermSource for ResampledNoise {
    fn term(&mut self, j: usize) -> Option<TermInputs> {
        if j == 1 || self.jitter == 0.0 {
            return Some(self.base);
        }
        let delta = self.rng.gen_range(-self.jitter..=self.jitter);
        Some(TermInputs { noise: (self.base.noise + delta).clamp(0.0, 1.0), ..self.base })
    }
}

/// Run rounds until the noise threshold is met or the cap is reached.
pub fn eosl_evaluate(
    model_id: impl Into<String>,
    source: &mut dyn TermSource,
    cfg: &EoslConfig,
) -> Result<EoslResult, EoslError> {
    let mut terms = Vec::new();
    let mut value = 0.0;
    let mut converged = false;
    for j in 1..=cfg.max_retransmissions {
        let t = source.term(j).ok_or(EoslError::TermSourceExhausted(j))?;
        value += eosl_single(t.noise, t.loss, t.ec_ratio, t.es_ratio, &cfg.weights)?;
        terms.push(TransmissionTerm { j, noise: t.noise, loss: t.loss, ec_ratio: t.ec_ratio, es_ratio: t.es_ratio });
        if t.noise <= cfg.noise_threshold {
            converged = true;
            break;
        }
    }
    Ok(EoslResult { model_id: model_id.into(), value, rounds_used: terms.len(), terms, converged })
}
