//! Inference energy from sampled power traces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("trace {0} has no samples")]
    EmptyTrace(String),
    #[error("trace {trace}: sample {index} timestamp does not increase")]
    NonMonotonicTimestamps { trace: String, index: usize },
    #[error("trace {trace}: sample {index} field `{field}` is invalid")]
    InvalidSample { trace: String, index: usize, field: &'static str },
    #[error("trace {0}: sample interval must be positive")]
    InvalidInterval(String),
    #[error("no energy summaries to normalize")]
    EmptyFleet,
    #[error("every energy total is zero")]
    AllZeroEnergies,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    /// Seconds since the trace started.
    pub t: f64,
    pub cpu_w: f64,
    pub gpu_w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_util_pct: Option<f64>,
}

impl PowerSample {
    pub fn new(t: f64, cpu_w: f64, gpu_w: f64) -> Self {
        Self { t, cpu_w, gpu_w, cpu_util_pct: None }
    }
}

fn default_interval() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub model_id: String,
    pub item_id: String,
    #[serde(rename = "sample_interval_s", default = "default_interval")]
    pub sample_interval: f64,
    pub samples: Vec<PowerSample>,
}

impl EnergyTrace {
    pub fn label(&self) -> String {
        format!("{}/{}", self.model_id, self.item_id)
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        let label = || self.label();
        if !(self.sample_interval.is_finite() && self.sample_interval > 0.0) {
            return Err(EnergyError::InvalidInterval(label()));
        }
        if self.samples.is_empty() {
            return Err(EnergyError::EmptyTrace(label()));
        }
        for (index, s) in self.samples.iter().enumerate() {
            let bad = |field| EnergyError::InvalidSample { trace: label(), index, field };
            if !(s.t.is_finite() && s.t >= 0.0) {
                return Err(bad("t"));
            }
            if !(s.cpu_w.is_finite() && s.cpu_w >= 0.0) {
                return Err(bad("cpu_w"));
            }
            if !(s.gpu_w.is_finite() && s.gpu_w >= 0.0) {
                return Err(bad("gpu_w"));
            }
            if index > 0 && s.t <= self.samples[index - 1].t {
                return Err(EnergyError::NonMonotonicTimestamps { trace: label(), index });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    pub model_id: String,
    pub item_id: String,
    pub cpu_energy: f64,
    pub gpu_energy: f64,
    pub total_energy: f64,
}

impl EnergySummary {
    pub fn new(model_id: impl Into<String>, item_id: impl Into<String>, cpu_energy: f64, gpu_energy: f64) -> Self {
        Self {
            model_id: model_id.into(),
            item_id: item_id.into(),
            cpu_energy,
            gpu_energy,
            total_energy: cpu_energy + gpu_energy,
        }
    }
}

/// Rectangle-rule integration of CPU and GPU power.
///
/// Each sample is held until the next one; the last sample is held for the
/// declared interval. On a regular trace this is just `sum(P) * dt`.
pub fn aggregate_trace(trace: &EnergyTrace) -> Result<EnergySummary, EnergyError> {
    trace.validate()?;
    let mut cpu = 0.0;
    let mut gpu = 0.0;
    for (i, s) in trace.samples.iter().enumerate() {
        let dt = match trace.samples.get(i + 1) {
            Some(next) => next.t - s.t,
            None => trace.sample_interval,
        };
        cpu += s.cpu_w * dt;
        gpu += s.gpu_w * dt;
    }
    Ok(EnergySummary::new(&trace.model_id, &trace.item_id, cpu, gpu))
}

/// Divide every total by the fleet maximum.
pub fn normalize_energies(summaries: &[EnergySummary]) -> Result<BTreeMap<String, f64>, EnergyError> {
    if summaries.is_empty() {
        return Err(EnergyError::EmptyFleet);
    }
    let max = summaries.iter().map(|s| s.total_energy).fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(EnergyError::AllZeroEnergies);
    }
    Ok(summaries.iter().map(|s| (s.model_id.clone(), s.total_energy / max)).collect())
}
