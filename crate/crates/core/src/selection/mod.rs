//! Scoring candidate fleets, picking per-item winners and comparing the
//! resulting leaderboards by similarity-to-power ratio.

mod leaderboard;
mod rounds;
mod score;
mod sweep;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::channel::{ChannelError, ChannelParams, LinkBudget};
use crate::energy::{EnergyError, EnergySummary};
use crate::eosl::{EoslConfig, EoslError};
use crate::io::CandidateRecord;
use crate::metalearn::MetaError;
use crate::metrics::{BleuParams, EmbeddingVector, GrayImage, Metric, MetricError, SsimWindow};

pub use leaderboard::{build_leaderboard, same_winners, spr, Criterion, LeaderboardRow, SprReport};
pub use rounds::{run_rounds, RoundReport, RoundsOutput};
pub use score::{score_item, score_items, ScoredItem, ScoredRow};
pub use sweep::{default_profiles, p_b_grid, sweep, SweepProfile, SweepRow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error("item {item}: no candidate/energy pair for model {model}")]
    MissingCandidate { item: String, model: String },
    #[error("item {item}: model {model} has no image for ssim")]
    MissingImage { item: String, model: String },
    #[error("item {item}: {source}")]
    Metric { item: String, source: MetricError },
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Eosl(#[from] EoslError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Meta(#[from] MetaError),
    #[error("no items to rank")]
    EmptyItemSet,
    #[error("item {0}: winner has zero energy, similarity-to-power ratio undefined")]
    ZeroEnergy(String),
    #[error("rounds need {needed} items but only {available} are available")]
    ManifestTooSmall { needed: usize, available: usize },
    #[error("invalid round sizes: {0}")]
    InvalidRounds(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

/// A candidate's output for one item, with its decoded image when one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub record: CandidateRecord,
    pub image: Option<GrayImage>,
}

impl Candidate {
    pub fn from_record(record: CandidateRecord) -> Self {
        Self { record, image: None }
    }
}

/// One input and every model's answer to it.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationItem {
    pub item_id: String,
    /// Intended meaning the candidates are judged against.
    pub reference_text: String,
    pub reference_embedding: Option<EmbeddingVector>,
    pub reference_image: Option<GrayImage>,
    /// Free-form context label; carried through, never scored.
    pub context: Option<String>,
    pub candidates: BTreeMap<String, Candidate>,
    pub energies: BTreeMap<String, EnergySummary>,
}

impl EvaluationItem {
    pub fn new(item_id: impl Into<String>, reference_text: impl Into<String>) -> Self {
        Self {
            item_id: item_id.into(),
            reference_text: reference_text.into(),
            reference_embedding: None,
            reference_image: None,
            context: None,
            candidates: BTreeMap::new(),
            energies: BTreeMap::new(),
        }
    }

    /// Add a model's caption and its inference energy.
    pub fn with_candidate(mut self, record: CandidateRecord, energy: EnergySummary) -> Self {
        let model = record.model_id.clone();
        self.candidates.insert(model.clone(), Candidate::from_record(record));
        self.energies.insert(model, energy);
        self
    }

    pub fn models(&self) -> impl Iterator<Item = &str> {
        self.candidates.keys().map(String::as_str)
    }
}

/// Everything scoring needs besides the item itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringContext {
    pub channel: ChannelParams,
    pub budget: LinkBudget,
    pub eosl: EoslConfig,
    pub metric: Metric,
    pub bleu: BleuParams,
    pub ssim_window: SsimWindow,
    pub seed: u64,
}

impl Default for ScoringContext {
    fn default() -> Self {
        Self {
            channel: ChannelParams::default(),
            budget: LinkBudget::default(),
            eosl: EoslConfig::default(),
            metric: Metric::Cosine,
            bleu: BleuParams::default(),
            ssim_window: SsimWindow::Global,
            seed: 0,
        }
    }
}

impl ScoringContext {
    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_weights(mut self, weights: crate::eosl::EoslWeights) -> Self {
        self.eosl.weights = weights;
        self
    }

    pub fn with_channel(mut self, channel: ChannelParams) -> Self {
        self.channel = channel;
        self
    }
}

/// Round sizes must be positive and strictly increasing.
pub fn validate_round_sizes(sizes: &[usize]) -> Result<(), SelectionError> {
    if sizes.is_empty() {
        return Err(SelectionError::InvalidRounds("at least one round is required".into()));
    }
    if sizes[0] == 0 {
        return Err(SelectionError::InvalidRounds("round sizes must be positive".into()));
    }
    if let Some(w) = sizes.windows(2).find(|w| w[1] <= w[0]) {
        return Err(SelectionError::InvalidRounds(format!("{} does not exceed {}", w[1], w[0])));
    }
    Ok(())
}
