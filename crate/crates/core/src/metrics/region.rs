use crate::distance::squared_distance_to_sites;
use crate::error::Result;
use crate::mask::{mask_iou_with, BinaryMask};

/// Region accuracy: `100 × IoU`, with two empty masks scoring `100 × empty_iou`.
pub fn region_j(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    region_j_with(pred, gt, crate::mask::EMPTY_IOU)
}

pub fn region_j_with(pred: &BinaryMask, gt: &BinaryMask, empty_iou: f64) -> Result<f64> {
    Ok(100.0 * mask_iou_with(pred, gt, empty_iou)?)
}

/// One-pixel-wide inner boundary: foreground pixels with a 4-neighbor that is
/// background or outside the image.
pub fn boundary_map(m: &BinaryMask) -> BinaryMask {
    let (w, h) = m.dims();
    BinaryMask::from_fn(w, h, |x, y| {
        if !m.get(x, y) {
            return false;
        }
        x == 0
            || y == 0
            || x + 1 == w
            || y + 1 == h
            || !m.get(x - 1, y)
            || !m.get(x + 1, y)
            || !m.get(x, y - 1)
            || !m.get(x, y + 1)
    })
}

/// Conventional boundary tolerance: 0.8% of the image diagonal, rounded up.
pub fn default_boundary_tolerance(width: usize, height: usize) -> f64 {
    (0.008 * ((width * width + height * height) as f64).sqrt()).ceil()
}

/// Boundary accuracy: F-measure (×100) between the boundary pixels of the two
/// masks, matching pixels within Euclidean distance `tolerance`.
pub fn boundary_f(pred: &BinaryMask, gt: &BinaryMask, tolerance: f64) -> Result<f64> {
    pred.same_dims(gt)?;
    if !(tolerance >= 0.0) {
        return Err(crate::Error::Contract(format!("boundary tolerance must be non-negative, got {tolerance}")));
    }
    let pb = boundary_map(pred);
    let gb = boundary_map(gt);
    let (np, ng) = (pb.area(), gb.area());
    if np == 0 && ng == 0 {
        return Ok(if pred == gt { 100.0 } else { 0.0 });
    }
    if np == 0 || ng == 0 {
        return Ok(0.0);
    }
    let (w, h) = pred.dims();
    let tol2 = tolerance * tolerance;
    let to_gt = squared_distance_to_sites(w, h, gb.bits(), false);
    let to_pred = squared_distance_to_sites(w, h, pb.bits(), false);
    let matched = |own: &BinaryMask, dist: &[f64]| {
        own.bits()
            .iter()
            .zip(dist)
            .filter(|(b, d)| **b && **d <= tol2)
            .count()
    };
    let precision = matched(&pb, &to_gt) as f64 / np as f64;
    let recall = matched(&gb, &to_pred) as f64 / ng as f64;
    if precision + recall == 0.0 {
        return Ok(0.0);
    }
    Ok(100.0 * 2.0 * precision * recall / (precision + recall))
}
