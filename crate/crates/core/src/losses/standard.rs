//! Dice, IoU-regression and occlusion terms of the combined objective.

use crate::error::{Error, Result};
use crate::mask::{BinaryMask, SoftMask};
use crate::scalar::Scalar;

pub const DICE_SMOOTH: f64 = 1.0;
const BCE_EPS: f64 = 1e-7;

/// `1 - (2Σpt + s) / (Σp + Σt + s)` with smoothing `s = 1`.
pub fn dice_loss<T: Scalar>(pred: &SoftMask<T>, target: &BinaryMask) -> Result<T> {
    if pred.dims() != target.dims() {
        return Err(Error::contract(format!(
            "prediction is {:?}, target is {:?}",
            pred.dims(),
            target.dims()
        )));
    }
    let (mut inter, mut sum_p, mut sum_t) = (T::zero(), T::zero(), T::zero());
    for (&p, &t) in pred.values().iter().zip(target.bits()) {
        sum_p += p;
        if t {
            inter += p;
            sum_t += T::one();
        }
    }
    let s = T::of(DICE_SMOOTH);
    Ok(T::one() - (T::of(2.0) * inter + s) / (sum_p + sum_t + s))
}

/// L1 distance between the predicted and the measured mask IoU.
pub fn iou_regression_loss<T: Scalar>(predicted_iou: T, actual_iou: T) -> Result<T> {
    for v in [predicted_iou, actual_iou] {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::contract(format!("IoU {v} outside [0, 1]")));
        }
    }
    Ok((predicted_iou - actual_iou).abs())
}

/// Binary cross-entropy on the object-visibility prediction.
pub fn occlusion_loss<T: Scalar>(predicted_visible: T, actually_visible: bool) -> Result<T> {
    if !(predicted_visible >= T::zero() && predicted_visible <= T::one()) {
        return Err(Error::contract(format!(
            "visibility probability {predicted_visible} outside [0, 1]"
        )));
    }
    let eps = T::of(BCE_EPS);
    let p = predicted_visible.max(eps).min(T::one() - eps);
    Ok(if actually_visible { -p.ln() } else { -(T::one() - p).ln() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dice_perfect_prediction_hits_smoothing_floor() {
        let t = BinaryMask::from_fn(4, 4, |x, y| x < 2 && y < 3);
        let p: SoftMask<f64> = t.to_soft();
        let loss = dice_loss(&p, &t).unwrap();
        let sum_t = t.area() as f64;
        assert!(loss <= 1.0 / (2.0 * sum_t + 1.0));
        assert_abs_diff_eq!(loss, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dice_disjoint() {
        let t = BinaryMask::from_fn(2, 1, |x, _| x == 0);
        let p = SoftMask::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(dice_loss(&p, &t).unwrap(), 1.0 - 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn iou_regression() {
        assert_eq!(iou_regression_loss(0.7, 0.7).unwrap(), 0.0);
        assert_abs_diff_eq!(iou_regression_loss(0.9, 0.6).unwrap(), 0.3, epsilon = 1e-15);
        assert!(iou_regression_loss(1.1, 0.6).is_err());
    }

    #[test]
    fn occlusion_half_is_ln2() {
        let ln2 = std::f64::consts::LN_2;
        assert_abs_diff_eq!(occlusion_loss(0.5, true).unwrap(), ln2, epsilon = 1e-15);
        assert_abs_diff_eq!(occlusion_loss(0.5, false).unwrap(), ln2, epsilon = 1e-15);
        assert!(occlusion_loss(1.0, true).unwrap() < 1e-6);
    }
}
