//! Energy-aware semantic model selection.
//!
//! Candidate encoders are scored on how well their output preserves meaning,
//! what it costs to send over a lossy link, and how much energy inference
//! took. The combined loss picks a winner per item; a cumulative blend carries
//! each model's record across rounds.

pub mod channel;
pub mod energy;
pub mod eosl;
pub mod fleet;
pub mod io;
pub mod metalearn;
pub mod metrics;
pub mod selection;
pub mod synthetic;

/// Version written to and accepted from every file format.
pub const FORMAT_VERSION: u32 = 1;

pub use channel::{ChannelError, ChannelParams, LinkBudget};
pub use energy::{EnergyError, EnergySummary, EnergyTrace, PowerSample};
pub use eosl::{EoslConfig, EoslError, EoslResult, EoslWeights, TermMode};
pub use io::{CandidateRecord, IoError, Manifest, ReportFormat, RunConfig};
pub use metalearn::{Checkpoint, CumulativeParams, CumulativeState, CumulativeStore, MetaError};
pub use metrics::{EmbeddingVector, GrayImage, Metric, MetricError, SimilarityScore, SsimParams, SsimWindow};
pub use selection::{
    Criterion, EvaluationItem, LeaderboardRow, RoundsOutput, ScoredItem, ScoredRow, ScoringContext, SelectionError,
    SprReport, SweepProfile, SweepRow,
};
