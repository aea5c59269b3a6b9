use serde::{Deserialize, Serialize};

use crate::distance::{connected_components, distance_transform_argmax};
use crate::error::{Error, Result};
use crate::mask::{BinaryMask, SoftMask};
use crate::prompt::{Click, Polarity};
use crate::scalar::Scalar;

/// Clicks produced by the simulation protocol, in placement order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickSequence {
    pub clicks: Vec<Click>,
}

impl ClickSequence {
    pub fn len(&self) -> usize {
        self.clicks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clicks.is_empty()
    }
}

/// The largest 4-connected region of false negatives or false positives,
/// with the click that would correct it. Ties go to the region whose first
/// pixel comes first in scanline order.
fn largest_error(gt: &BinaryMask, pred: &BinaryMask) -> Result<Option<(BinaryMask, Click)>> {
    let (w, h) = gt.dims();
    let fn_mask = BinaryMask::from_fn(w, h, |x, y| gt.get(x, y) && !pred.get(x, y));
    let fp_mask = BinaryMask::from_fn(w, h, |x, y| !gt.get(x, y) && pred.get(x, y));
    let mut best: Option<(usize, usize, BinaryMask, Polarity)> = None;
    for (mask, polarity) in [(fn_mask, Polarity::Positive), (fp_mask, Polarity::Negative)] {
        let comps = connected_components(&mask);
        for (label, &size) in comps.sizes.iter().enumerate() {
            let first = comps.labels.iter().position(|l| *l == Some(label)).unwrap_or(usize::MAX);
            let better = match &best {
                None => true,
                Some((s, f, _, _)) => size > *s || (size == *s && first < *f),
            };
            if better {
                best = Some((size, first, comps.mask_of(label), polarity));
            }
        }
    }
    match best {
        None => Ok(None),
        Some((_, _, region, polarity)) => {
            let (x, y) = distance_transform_argmax(&region)?;
            Ok(Some((region, Click { x, y, polarity })))
        }
    }
}

/// Simulated clicks on the prompt frame. The first click goes to the center of
/// the ground truth; each later one to the center of the largest remaining
/// error region. Without a segmenter in the loop, a click is assumed to fix
/// exactly the region it lands in. Stops early once nothing is wrong.
pub fn simulate_clicks<T: Scalar>(
    gt: &BinaryMask,
    current_pred: Option<&SoftMask<T>>,
    n: usize,
) -> Result<ClickSequence> {
    let mut pred = match current_pred {
        Some(p) => {
            if p.dims() != gt.dims() {
                return Err(Error::contract(format!(
                    "prediction is {:?}, ground truth is {:?}",
                    p.dims(),
                    gt.dims()
                )));
            }
            p.binarize()
        }
        None => BinaryMask::empty(gt.width(), gt.height()),
    };
    let (w, h) = gt.dims();
    simulate_clicks_with(gt, n, |clicks| {
        // The region under the newest click takes its ground-truth label.
        if let Some(last) = clicks.last() {
            if clicks.len() > 1 {
                if let Some((region, _)) = largest_error(gt, &pred)? {
                    if region.get(last.x, last.y) {
                        pred = BinaryMask::from_fn(w, h, |x, y| {
                            if region.get(x, y) {
                                gt.get(x, y)
                            } else {
                                pred.get(x, y)
                            }
                        });
                    }
                }
            }
        }
        Ok(pred.clone())
    })
}

/// Click simulation with a segmenter in the loop: after each click,
/// `segment` is called with all clicks so far and returns the new prediction
/// on the prompt frame.
pub fn simulate_clicks_with(
    gt: &BinaryMask,
    n: usize,
    mut segment: impl FnMut(&[Click]) -> Result<BinaryMask>,
) -> Result<ClickSequence> {
    if n == 0 {
        return Err(Error::contract("at least one click is required"));
    }
    if gt.is_empty() {
        return Err(Error::degenerate("ground-truth mask is empty"));
    }
    let (x, y) = distance_transform_argmax(gt)?;
    let mut clicks = vec![Click::positive(x, y)];
    while clicks.len() < n {
        let pred = segment(&clicks)?;
        gt.same_dims(&pred)?;
        match largest_error(gt, &pred)? {
            Some((_, click)) => clicks.push(click),
            None => break,
        }
    }
    Ok(ClickSequence { clicks })
}
