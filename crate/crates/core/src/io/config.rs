use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{check_version, read_json, IoError};
use crate::channel::{ChannelParams, LinkBudget};
use crate::eosl::{EoslConfig, EoslError};
use crate::metalearn::CumulativeParams;
use crate::metrics::{BleuParams, Metric, SsimWindow};
use crate::selection::{validate_round_sizes, ScoringContext};

/// Everything a run needs besides the data. Every field has a default, so
/// `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub channel: ChannelParams,
    pub budget: LinkBudget,
    pub eosl: EoslConfig,
    pub cumulative: CumulativeParams,
    pub similarity_metric: Metric,
    pub bleu: BleuParams,
    pub ssim_window: SsimWindow,
    pub round_sizes: Vec<usize>,
    pub seed: u64,
    /// Fleet used by sweeps; the built-in five-model fleet when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            format_version: Some(crate::FORMAT_VERSION),
            channel: ChannelParams::default(),
            budget: LinkBudget::default(),
            eosl: EoslConfig::default(),
            cumulative: CumulativeParams::default(),
            similarity_metric: Metric::Cosine,
            bleu: BleuParams::default(),
            ssim_window: SsimWindow::Global,
            round_sizes: vec![10, 25, 50, 100],
            seed: 0,
            manifest: None,
        }
    }
}

fn eosl_field(err: &EoslError) -> String {
    match err {
        EoslError::InvalidWeights(_) => "eosl.weights".into(),
        EoslError::InvalidConfig { field, .. } => format!("eosl.{field}"),
        _ => "eosl".into(),
    }
}

impl RunConfig {
    /// Check the invariants serde cannot express. `path` only labels errors.
    pub fn validate(&self, path: &Path) -> Result<(), IoError> {
        check_version(path, "format_version", self.format_version)?;
        self.eosl.validate().map_err(|e| IoError::schema(path, eosl_field(&e), e))?;
        validate_round_sizes(&self.round_sizes).map_err(|e| IoError::schema(path, "round_sizes", e))?;
        if self.bleu.max_n == 0 {
            return Err(IoError::schema(path, "bleu.max_n", "must be >= 1"));
        }
        if let SsimWindow::Sliding(side) = self.ssim_window {
            if side == 0 || side % 2 == 0 {
                return Err(IoError::schema(path, "ssim_window.sliding", "window side must be odd and positive"));
            }
        }
        Ok(())
    }

    /// Load and validate; a relative `manifest` is resolved against the
    /// config's directory.
    pub fn load(path: &Path) -> Result<Self, IoError> {
        let mut cfg: RunConfig = read_json(path)?;
        cfg.validate(path)?;
        if let Some(m) = &cfg.manifest {
            if m.is_relative() {
                cfg.manifest = Some(path.parent().unwrap_or_else(|| Path::new(".")).join(m));
            }
        }
        Ok(cfg)
    }

    pub fn scoring_context(&self) -> ScoringContext {
        ScoringContext {
            channel: self.channel,
            budget: self.budget,
            eosl: self.eosl,
            metric: self.similarity_metric,
            bleu: self.bleu,
            ssim_window: self.ssim_window,
            seed: self.seed,
        }
    }
}
