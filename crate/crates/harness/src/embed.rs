use memtrack::{FeatureGrid, Frame};

use crate::error::Result;

/// Maps a frame to a grid of patch features. Implementations must be
/// deterministic.
pub trait FrameEmbedder: Send + Sync {
    fn embed(&self, frame: &Frame) -> Result<FeatureGrid<f64>>;
    /// Patch columns and rows produced for a `width x height` frame.
    fn grid(&self) -> (usize, usize);
}

/// Hand-made features per patch: mean RGB in `[0, 1]`, the patch center in
/// normalized image coordinates, and the variance of pixel intensity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatchEmbedder {
    pub cols: usize,
    pub rows: usize,
}

pub const PATCH_FEATURES: usize = 6;

impl Default for PatchEmbedder {
    fn default() -> Self {
        Self { cols: 8, rows: 8 }
    }
}

/// Pixel span `[start, end)` of patch `i` out of `n` over `len` pixels.
pub fn patch_span(i: usize, n: usize, len: usize) -> (usize, usize) {
    (i * len / n, (i + 1) * len / n)
}

impl FrameEmbedder for PatchEmbedder {
    fn grid(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    fn embed(&self, frame: &Frame) -> Result<FeatureGrid<f64>> {
        let (w, h) = frame.dims();
        let mut data = Vec::with_capacity(self.cols * self.rows * PATCH_FEATURES);
        for r in 0..self.rows {
            let (y0, y1) = patch_span(r, self.rows, h);
            for c in 0..self.cols {
                let (x0, x1) = patch_span(c, self.cols, w);
                let n = ((x1 - x0) * (y1 - y0)).max(1) as f64;
                let mut sum = [0.0; 3];
                let mut sum_i = 0.0;
                let mut sum_i2 = 0.0;
                for y in y0..y1 {
                    for x in x0..x1 {
                        let p = frame.pixel(x, y);
                        let rgb = [p[0] as f64 / 255.0, p[1] as f64 / 255.0, p[2] as f64 / 255.0];
                        for k in 0..3 {
                            sum[k] += rgb[k];
                        }
                        let i = (rgb[0] + rgb[1] + rgb[2]) / 3.0;
                        sum_i += i;
                        sum_i2 += i * i;
                    }
                }
                let mean_i = sum_i / n;
                data.extend([
                    sum[0] / n,
                    sum[1] / n,
                    sum[2] / n,
                    (c as f64 + 0.5) / self.cols as f64,
                    (r as f64 + 0.5) / self.rows as f64,
                    (sum_i2 / n - mean_i * mean_i).max(0.0),
                ]);
            }
        }
        Ok(FeatureGrid::new(self.cols, self.rows, PATCH_FEATURES, data)?)
    }
}
