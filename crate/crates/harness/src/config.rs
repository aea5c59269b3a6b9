use std::path::{Path, PathBuf};

use memtrack::losses::{FocalConfig, GaussianKernel, LossWeights, SofteningConfig, Temperature};
use memtrack::memory::MemoryConfig;
use memtrack::metrics::EvalSettings;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::propagate::{MemoryMode, PropagatorParams};
use crate::sampler::SamplerConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    Clicks,
    Box,
    Mask,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub name: String,
    pub seed: u64,
    /// Number of scenes in the seeded disappear/reappear suite.
    pub scenes: usize,
    /// Adds the static single-square scene to the run.
    pub include_static: bool,
    pub modes: Vec<MemoryMode>,
    pub prompt: PromptKind,
    /// Clicks simulated per object when `prompt = "clicks"`.
    pub clicks: usize,
    /// Frames after a reappearance within which the object must be found.
    pub reacquire_window: usize,
    /// Region score (0-100) that counts as found.
    pub reacquire_j: f64,
    /// Optional semantic-head checkpoint whose temporal embeddings are added
    /// to long-term memory features.
    pub temporal_checkpoint: Option<PathBuf>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            name: "reappear-suite".into(),
            seed: 7,
            scenes: 20,
            include_static: false,
            modes: MemoryMode::ALL.to_vec(),
            prompt: PromptKind::Clicks,
            clicks: 3,
            reacquire_window: 10,
            reacquire_j: 50.0,
            temporal_checkpoint: None,
        }
    }
}

/// Training objective settings. The tracker does not train; these are carried
/// so one file holds every hyperparameter of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossesSection {
    pub lambda_arl: f64,
    pub lambda_tsl: f64,
    pub sigma: f64,
    pub kernel_size: usize,
    pub focal_gamma: f64,
    pub temperature: Temperature,
}

impl Default for LossesSection {
    fn default() -> Self {
        let w = LossWeights::default();
        let s = SofteningConfig::default();
        Self {
            lambda_arl: w.lambda_arl,
            lambda_tsl: w.lambda_tsl,
            sigma: s.sigma,
            kernel_size: s.kernel_size,
            focal_gamma: FocalConfig::default().gamma,
            temperature: Temperature::default(),
        }
    }
}

impl LossesSection {
    pub fn weights(&self) -> LossWeights {
        LossWeights {
            lambda_arl: self.lambda_arl,
            lambda_tsl: self.lambda_tsl,
        }
    }

    fn validate(&self) -> Result<()> {
        GaussianKernel::<f64>::new(self.sigma, self.kernel_size)
            .map_err(|e| HarnessError::config("losses.kernel_size", e.to_string()))?;
        for (name, v) in [
            ("lambda_arl", self.lambda_arl),
            ("lambda_tsl", self.lambda_tsl),
            ("focal_gamma", self.focal_gamma),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(HarnessError::config(format!("losses.{name}"), "must be non-negative"));
            }
        }
        if !(self.temperature.value > 0.0) {
            return Err(HarnessError::config("losses.temperature.value", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub memory: MemoryConfig,
    pub losses: LossesSection,
    pub sampler: SamplerConfig,
    pub metrics: EvalSettings,
    pub propagator: PropagatorParams,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            HarnessError::config(if field == "." { "<root>".into() } else { field }, e.inner().message().trim())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if e.modes.is_empty() {
            return Err(HarnessError::config("experiment.modes", "at least one memory mode is required"));
        }
        if e.scenes == 0 && !e.include_static {
            return Err(HarnessError::config("experiment.scenes", "the run has no scenes"));
        }
        if e.prompt == PromptKind::Clicks && e.clicks == 0 {
            return Err(HarnessError::config("experiment.clicks", "at least one click is required"));
        }
        if !(0.0..=100.0).contains(&e.reacquire_j) {
            return Err(HarnessError::config("experiment.reacquire_j", "must lie in [0, 100]"));
        }
        if e.reacquire_window == 0 {
            return Err(HarnessError::config("experiment.reacquire_window", "must be positive"));
        }
        self.memory
            .validate()
            .map_err(|err| HarnessError::config("memory", err.to_string()))?;
        self.losses.validate()?;
        self.sampler.validate()?;
        self.propagator.validate()?;
        if let Some(t) = self.metrics.boundary_tolerance {
            if !(t >= 0.0) {
                return Err(HarnessError::config("metrics.boundary_tolerance", "must be non-negative"));
            }
        }
        Ok(())
    }
}
