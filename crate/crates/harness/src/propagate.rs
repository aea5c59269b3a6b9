//! Non-learned memory read: every patch of the new frame votes for
//! foreground by its similarity to labelled patches of the memory context,
//! then pixels inside the voted region are split by color.

use memtrack::memory::{MemoryBank, MemoryEntry};
use memtrack::{BinaryMask, FeatureGrid, Frame, SoftMask};
use serde::{Deserialize, Serialize};

use crate::embed::patch_span;
use crate::error::{HarnessError, Result};

/// Which memory entries the propagator reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryMode {
    /// Prompt frame, diverse long-term entries and the recent window.
    Divemem,
    /// Prompt frame and the recent window only.
    GreedyRecent,
    /// The most recent observed frames only.
    ShortOnly,
}

impl MemoryMode {
    pub const ALL: [MemoryMode; 3] = [MemoryMode::Divemem, MemoryMode::GreedyRecent, MemoryMode::ShortOnly];

    pub fn name(self) -> &'static str {
        match self {
            MemoryMode::Divemem => "divemem",
            MemoryMode::GreedyRecent => "greedy_recent",
            MemoryMode::ShortOnly => "short_only",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagatorParams {
    /// Squared feature distance at which similarity falls to `1/e`.
    pub bandwidth: f64,
    /// Weight of the patch-position features in the distance.
    pub position_weight: f64,
    /// Weight of the intensity-variance feature in the distance.
    pub variance_weight: f64,
    /// Background prior, in bandwidth units: a patch needs memory matches
    /// closer than this to be voted foreground at all.
    pub reject_distance: f64,
    /// Patch vote needed to count as foreground.
    pub fg_threshold: f64,
    /// Color tolerance (0-255 scale, Euclidean) for growing click and box prompts.
    pub grow_tolerance: f64,
}

impl Default for PropagatorParams {
    fn default() -> Self {
        Self {
            bandwidth: 0.05,
            position_weight: 0.2,
            variance_weight: 1.0,
            reject_distance: 4.0,
            fg_threshold: 0.5,
            grow_tolerance: 40.0,
        }
    }
}

impl PropagatorParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [("bandwidth", self.bandwidth), ("grow_tolerance", self.grow_tolerance)];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(HarnessError::config(format!("propagator.{name}"), "must be positive"));
            }
        }
        let non_negative = [
            ("position_weight", self.position_weight),
            ("variance_weight", self.variance_weight),
            ("reject_distance", self.reject_distance),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(HarnessError::config(format!("propagator.{name}"), "must be non-negative"));
            }
        }
        if !(0.0..=1.0).contains(&self.fg_threshold) {
            return Err(HarnessError::config("propagator.fg_threshold", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Entries read for the next frame under `mode`.
pub fn context_for<'a>(bank: &'a MemoryBank<f64>, mode: MemoryMode) -> Vec<&'a MemoryEntry<f64>> {
    match mode {
        MemoryMode::Divemem => bank.assemble_context(),
        MemoryMode::GreedyRecent => bank.initial().into_iter().chain(bank.short_term()).collect(),
        MemoryMode::ShortOnly => {
            let all: Vec<_> = bank.initial().into_iter().chain(bank.short_term()).collect();
            let keep = bank.config().n_short.min(all.len());
            all[all.len() - keep..].to_vec()
        }
    }
}

/// Fraction of foreground pixels in each patch of `mask`.
pub fn patch_labels(mask: &SoftMask<f64>, cols: usize, rows: usize) -> Vec<f64> {
    let (w, h) = mask.dims();
    let mut out = Vec::with_capacity(cols * rows);
    for r in 0..rows {
        let (y0, y1) = patch_span(r, rows, h);
        for c in 0..cols {
            let (x0, x1) = patch_span(c, cols, w);
            let mut fg = 0usize;
            for y in y0..y1 {
                for x in x0..x1 {
                    fg += usize::from(mask.get(x, y) >= 0.5);
                }
            }
            out.push(fg as f64 / ((x1 - x0) * (y1 - y0)).max(1) as f64);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Propagation {
    pub mask: BinaryMask,
    pub confidence: f64,
    /// Per-patch foreground vote.
    pub votes: Vec<f64>,
}

fn feature_distance(p: &PropagatorParams, a: &[f64], b: &[f64]) -> f64 {
    let sq = |i: usize| (a[i] - b[i]) * (a[i] - b[i]);
    sq(0) + sq(1) + sq(2) + p.position_weight * (sq(3) + sq(4)) + p.variance_weight * sq(5)
}

fn color_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
}

/// Reads the context for one frame. `temporal` holds one vector per
/// long-term slot, added to that entry's patch features.
pub fn propagate(
    params: &PropagatorParams,
    context: &[&MemoryEntry<f64>],
    temporal: &[Vec<f64>],
    frame: &Frame,
    grid: &FeatureGrid<f64>,
) -> Result<Propagation> {
    let (cols, rows) = (grid.cols(), grid.rows());
    let mut memory: Vec<(Vec<f64>, f64)> = Vec::new();
    for e in context {
        let feats = e
            .features
            .as_ref()
            .ok_or_else(|| memtrack::Error::Contract(format!("memory entry {} has no features", e.frame_index)))?;
        if (feats.cols(), feats.rows(), feats.dim()) != (cols, rows, grid.dim()) {
            return Err(memtrack::Error::Contract("memory features do not match the frame grid".into()).into());
        }
        let offset = e.temporal_embedding_id.and_then(|s| temporal.get(s));
        for (patch, label) in feats.patches().zip(patch_labels(&e.mask, cols, rows)) {
            let mut f = patch.to_vec();
            if let Some(t) = offset {
                for (v, d) in f.iter_mut().zip(t) {
                    *v += d;
                }
            }
            memory.push((f, label));
        }
    }

    let prior = (-params.reject_distance).exp();
    let mut votes = Vec::with_capacity(cols * rows);
    let mut top = Vec::with_capacity(cols * rows);
    for patch in grid.patches() {
        let mut num = 0.0;
        let mut den = prior;
        let mut best = 0.0f64;
        for (f, label) in &memory {
            let w = (-feature_distance(params, patch, f) / params.bandwidth).exp();
            num += w * label;
            den += w;
            best = best.max(w);
        }
        votes.push(num / den);
        top.push(best);
    }

    let fg: Vec<bool> = votes.iter().map(|v| *v >= params.fg_threshold).collect();
    let n_fg = fg.iter().filter(|b| **b).count();
    let (w, h) = frame.dims();
    if n_fg == 0 {
        return Ok(Propagation { mask: BinaryMask::empty(w, h), confidence: 0.0, votes });
    }
    let confidence = fg.iter().zip(&top).filter(|(f, _)| **f).map(|(_, t)| t).sum::<f64>() / n_fg as f64;

    let color = |i: usize| {
        let p = grid.patch(i);
        [p[0], p[1], p[2]]
    };
    let at = |c: isize, r: isize| -> Option<usize> {
        (c >= 0 && r >= 0 && (c as usize) < cols && (r as usize) < rows).then(|| r as usize * cols + c as usize)
    };
    // Foreground color from patches deep inside the voted region when there
    // are any, otherwise from all voted patches.
    let interior: Vec<usize> = (0..cols * rows)
        .filter(|&i| {
            let (c, r) = ((i % cols) as isize, (i / cols) as isize);
            fg[i] && [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().all(|(dc, dr)| at(c + dc, r + dr).map_or(true, |j| fg[j]))
        })
        .collect();
    let fg_source: Vec<usize> = if interior.is_empty() { (0..cols * rows).filter(|&i| fg[i]).collect() } else { interior };
    let mut fg_color = [0.0; 3];
    let mut total = 0.0;
    for &i in &fg_source {
        let c = color(i);
        for k in 0..3 {
            fg_color[k] += votes[i] * c[k];
        }
        total += votes[i];
    }
    for v in &mut fg_color {
        *v /= total;
    }

    let mut global_bg = [0.0; 3];
    let mut n_bg = 0.0;
    for i in (0..cols * rows).filter(|&i| !fg[i]) {
        let c = color(i);
        for k in 0..3 {
            global_bg[k] += c[k];
        }
        n_bg += 1.0;
    }

    let mut mask = BinaryMask::empty(w, h);
    for r in 0..rows {
        for c in 0..cols {
            let (ci, ri) = (c as isize, r as isize);
            let near_fg = (-1..=1).any(|dr| (-1..=1).any(|dc| at(ci + dc, ri + dr).is_some_and(|j| fg[j])));
            if !near_fg {
                continue;
            }
            // Local background from non-voted patches within two patches.
            let mut bg = [0.0; 3];
            let mut weight = 0.0;
            for dr in -2..=2 {
                for dc in -2..=2 {
                    if let Some(j) = at(ci + dc, ri + dr).filter(|&j| !fg[j]) {
                        let col = color(j);
                        let wt = 1.0 - votes[j];
                        for k in 0..3 {
                            bg[k] += wt * col[k];
                        }
                        weight += wt;
                    }
                }
            }
            let bg = if weight > 0.0 {
                [bg[0] / weight, bg[1] / weight, bg[2] / weight]
            } else if n_bg > 0.0 {
                [global_bg[0] / n_bg, global_bg[1] / n_bg, global_bg[2] / n_bg]
            } else {
                [f64::INFINITY; 3]
            };
            let (x0, x1) = patch_span(c, cols, w);
            let (y0, y1) = patch_span(r, rows, h);
            for y in y0..y1 {
                for x in x0..x1 {
                    let p = frame.pixel(x, y);
                    let px = [p[0] as f64 / 255.0, p[1] as f64 / 255.0, p[2] as f64 / 255.0];
                    if color_distance(px, fg_color) < color_distance(px, bg) {
                        mask.set(x, y, true);
                    }
                }
            }
        }
    }
    Ok(Propagation { mask, confidence, votes })
}
