use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::region::{boundary_f, default_boundary_tolerance, region_j_with};
use crate::error::{Error, Result};
use crate::mask::{BinaryMask, EMPTY_IOU};
use crate::masklet::Masklet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSettings {
    /// Boundary match radius in pixels; `None` uses 0.8% of the image diagonal.
    #[serde(default)]
    pub boundary_tolerance: Option<f64>,
    /// IoU credited when prediction and ground truth are both empty.
    #[serde(default = "default_empty_iou")]
    pub empty_iou: f64,
    /// Leave the prompt frame out of the per-masklet averages.
    #[serde(default)]
    pub skip_prompt_frame: bool,
}

fn default_empty_iou() -> f64 {
    EMPTY_IOU
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            boundary_tolerance: None,
            empty_iou: EMPTY_IOU,
            skip_prompt_frame: false,
        }
    }
}

/// Frame count and resolution of the evaluated video.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VideoExtent {
    pub frames: usize,
    pub width: usize,
    pub height: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskletScore {
    pub instance_id: u32,
    pub j: f64,
    pub f: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub j_mean: f64,
    pub f_mean: f64,
    pub jf_mean: f64,
    pub per_masklet: Vec<MaskletScore>,
}

impl EvalResult {
    /// Unweighted means over the given per-masklet scores.
    pub fn from_scores(per_masklet: Vec<MaskletScore>) -> Result<Self> {
        if per_masklet.is_empty() {
            return Err(Error::degenerate("no masklets to average"));
        }
        let n = per_masklet.len() as f64;
        let mut j = 0.0;
        let mut f = 0.0;
        for s in &per_masklet {
            j += s.j;
            f += s.f;
        }
        let (j_mean, f_mean) = (j / n, f / n);
        Ok(Self {
            j_mean,
            f_mean,
            jf_mean: (j_mean + f_mean) / 2.0,
            per_masklet,
        })
    }
}

/// Per-frame `(J, F)` for one masklet over the evaluated frames. Frames absent
/// from a track are scored as empty masks.
pub fn per_frame_scores(
    pred: &Masklet,
    gt: &Masklet,
    extent: VideoExtent,
    settings: &EvalSettings,
) -> Result<Vec<(usize, f64, f64)>> {
    let empty = BinaryMask::new(extent.width, extent.height, vec![false; extent.width * extent.height])?;
    let tolerance = settings
        .boundary_tolerance
        .unwrap_or_else(|| default_boundary_tolerance(extent.width, extent.height));
    pred.check_within(extent.frames)?;
    gt.check_within(extent.frames)?;
    let start = usize::from(settings.skip_prompt_frame);
    (start..extent.frames)
        .map(|t| {
            let p = pred.get(t).unwrap_or(&empty);
            let g = gt.get(t).unwrap_or(&empty);
            Ok((t, region_j_with(p, g, settings.empty_iou)?, boundary_f(p, g, tolerance)?))
        })
        .collect()
}

/// J and F per masklet, averaged over frames, then unweighted dataset means.
/// Masklets are paired by instance id.
pub fn jf_evaluate(
    pred_masklets: &[Masklet],
    gt_masklets: &[Masklet],
    extent: VideoExtent,
    settings: &EvalSettings,
) -> Result<EvalResult> {
    let preds: BTreeMap<u32, &Masklet> = pred_masklets.iter().map(|m| (m.instance_id, m)).collect();
    let gts: BTreeMap<u32, &Masklet> = gt_masklets.iter().map(|m| (m.instance_id, m)).collect();
    let unmatched_pred: Vec<u32> = preds.keys().filter(|k| !gts.contains_key(k)).copied().collect();
    let unmatched_gt: Vec<u32> = gts.keys().filter(|k| !preds.contains_key(k)).copied().collect();
    if !unmatched_pred.is_empty() || !unmatched_gt.is_empty() {
        return Err(Error::Alignment {
            unmatched_pred,
            unmatched_gt,
        });
    }
    let mut scores = Vec::with_capacity(gts.len());
    for (id, gt) in &gts {
        let frames = per_frame_scores(preds[id], gt, extent, settings)?;
        if frames.is_empty() {
            return Err(Error::degenerate("no frames to evaluate"));
        }
        let n = frames.len() as f64;
        let mut j = 0.0;
        let mut f = 0.0;
        for (_, fj, ff) in &frames {
            j += fj;
            f += ff;
        }
        scores.push(MaskletScore {
            instance_id: *id,
            j: j / n,
            f: f / n,
        });
    }
    EvalResult::from_scores(scores)
}

/// Aligned text table with one row per method, one J&F column per subset and
/// a trailing average column, values to two decimals.
pub fn jf_table(subsets: &[String], rows: &[(String, Vec<f64>)]) -> String {
    let mut header = vec!["Method".to_string()];
    header.extend(subsets.iter().cloned());
    header.push("Avg".into());
    let mut body: Vec<Vec<String>> = Vec::new();
    for (name, values) in rows {
        let mut line = vec![name.clone()];
        line.extend(values.iter().map(|v| format!("{v:.2}")));
        let avg = if values.is_empty() {
            0.0
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        };
        line.push(format!("{avg:.2}"));
        body.push(line);
    }
    let cols = header.len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            std::iter::once(&header)
                .chain(&body)
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for line in std::iter::once(&header).chain(&body) {
        for (c, cell) in line.iter().enumerate() {
            let w = widths[c];
            if c == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "  {cell:>w$}");
            }
        }
        out.push('\n');
    }
    out
}
