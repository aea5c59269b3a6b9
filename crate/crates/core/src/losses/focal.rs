use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::SoftMask;
use crate::scalar::Scalar;

/// Predictions are clamped into `[FOCAL_EPS, 1 - FOCAL_EPS]` before the logs.
pub const FOCAL_EPS: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FocalConfig {
    pub gamma: f64,
}

impl Default for FocalConfig {
    fn default() -> Self {
        Self { gamma: 2.0 }
    }
}

/// Mean over pixels of the soft-target focal loss
/// `-[ŷ(1-p)^γ ln p + (1-ŷ) p^γ ln(1-p)]`.
///
/// With `gamma = 0` this is binary cross-entropy against soft targets.
pub fn focal_arl_loss<T: Scalar>(pred: &SoftMask<T>, soft_target: &SoftMask<T>, gamma: T) -> Result<T> {
    if pred.dims() != soft_target.dims() {
        return Err(Error::contract(format!(
            "prediction is {:?}, target is {:?}",
            pred.dims(),
            soft_target.dims()
        )));
    }
    if !(gamma >= T::zero()) {
        return Err(Error::contract(format!("focal gamma must be non-negative, got {gamma}")));
    }
    let eps = T::of(FOCAL_EPS);
    let one = T::one();
    let mut acc = T::zero();
    for (&p, &y) in pred.values().iter().zip(soft_target.values()) {
        let p = p.max(eps).min(one - eps);
        let pos = y * (one - p).powf(gamma) * p.ln();
        let neg = (one - y) * p.powf(gamma) * (one - p).ln();
        acc += -(pos + neg);
    }
    Ok(acc / T::of(pred.values().len() as f64))
}
