//! Training objectives: label softening with a focal loss, the standard mask
//! terms, the semantic contrastive loss, and their weighted sum.

mod contrastive;
mod focal;
mod kernel;
mod standard;
mod total;

pub use contrastive::{
    contrastive_forward, tsl_contrastive_loss, ContrastiveForward, Temperature, TemperatureMode,
};
pub use focal::{focal_arl_loss, FocalConfig, FOCAL_EPS};
pub use kernel::{gaussian_soften, GaussianKernel};
pub use standard::{dice_loss, iou_regression_loss, occlusion_loss, DICE_SMOOTH};
pub use total::{total_loss, LossParts, LossReport, LossWeights};

use serde::{Deserialize, Serialize};

/// Label-softening settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SofteningConfig {
    pub sigma: f64,
    pub kernel_size: usize,
}

impl Default for SofteningConfig {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            kernel_size: 5,
        }
    }
}
