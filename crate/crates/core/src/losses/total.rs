use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossWeights {
    pub lambda_arl: f64,
    pub lambda_tsl: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_arl: 20.0,
            lambda_tsl: 0.1,
        }
    }
}

/// Unweighted per-sample loss terms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LossParts<T> {
    pub arl: T,
    pub iou: T,
    pub dice: T,
    pub occ: T,
    pub tsl: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LossReport<T> {
    pub l_arl: T,
    pub l_iou: T,
    pub l_dice: T,
    pub l_occ: T,
    pub l_tsl: T,
    pub total: T,
}

/// `λ_arl·L_arl + L_iou + L_dice + L_occ + λ_tsl·L_tsl`. The semantic term is
/// dropped for samples without a category label.
pub fn total_loss<T: Scalar>(parts: LossParts<T>, w: LossWeights, has_semantic_label: bool) -> Result<LossReport<T>> {
    if !(w.lambda_arl >= 0.0 && w.lambda_tsl >= 0.0) {
        return Err(Error::contract(format!("loss weights must be non-negative, got {w:?}")));
    }
    let named = [
        ("arl", parts.arl),
        ("iou", parts.iou),
        ("dice", parts.dice),
        ("occ", parts.occ),
        ("tsl", parts.tsl),
    ];
    for (name, v) in named {
        if !v.is_finite() {
            return Err(Error::Numeric(format!("loss term {name} is {v}")));
        }
        if v < T::zero() {
            return Err(Error::contract(format!("loss term {name} is negative ({v})")));
        }
    }
    let l_tsl = if has_semantic_label { parts.tsl } else { T::zero() };
    let total = T::of(w.lambda_arl) * parts.arl + parts.iou + parts.dice + parts.occ + T::of(w.lambda_tsl) * l_tsl;
    Ok(LossReport {
        l_arl: parts.arl,
        l_iou: parts.iou,
        l_dice: parts.dice,
        l_occ: parts.occ,
        l_tsl,
        total,
    })
}
