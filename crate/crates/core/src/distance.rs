//! Exact Euclidean distance transforms and connected-component labeling.

use crate::error::{Error, Result};
use crate::mask::BinaryMask;

const INF: f64 = 1e20;

/// One-dimensional squared distance transform of a sampled function
/// (lower envelope of parabolas, Felzenszwalb & Huttenlocher).
fn sq_dt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    let parabola_cross = |q: usize, p: usize| {
        ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
    };
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s = parabola_cross(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = parabola_cross(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Squared Euclidean distance from every cell of a `width x height` grid to
/// the nearest `site` cell. Cells with no site anywhere get a huge value.
///
/// With `outside_is_site`, every cell beyond the grid border counts as a site,
/// i.e. distances are clipped by the distance to the outside.
pub fn squared_distance_to_sites(
    width: usize,
    height: usize,
    sites: &[bool],
    outside_is_site: bool,
) -> Vec<f64> {
    assert_eq!(sites.len(), width * height);
    // Pad by one ring when the outside participates.
    let pad = usize::from(outside_is_site);
    let w = width + 2 * pad;
    let h = height + 2 * pad;
    let mut grid = vec![INF; w * h];
    for y in 0..h {
        for x in 0..w {
            let inside = x >= pad && y >= pad && x < width + pad && y < height + pad;
            let site = if inside {
                sites[(y - pad) * width + (x - pad)]
            } else {
                true
            };
            if site {
                grid[y * w + x] = 0.0;
            }
        }
    }

    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    for x in 0..w {
        for y in 0..h {
            f[y] = grid[y * w + x];
        }
        sq_dt_1d(&f[..h], &mut out[..h], &mut v, &mut z);
        for y in 0..h {
            grid[y * w + x] = out[y];
        }
    }
    for y in 0..h {
        f[..w].copy_from_slice(&grid[y * w..(y + 1) * w]);
        sq_dt_1d(&f[..w], &mut out[..w], &mut v, &mut z);
        grid[y * w..(y + 1) * w].copy_from_slice(&out[..w]);
    }

    let mut result = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            result.push(grid[(y + pad) * w + (x + pad)]);
        }
    }
    result
}

/// Squared distance from every foreground pixel to the nearest background
/// pixel, treating everything outside the grid as background. Background
/// pixels map to 0.
pub fn squared_distance_to_background(m: &BinaryMask) -> Vec<f64> {
    let background: Vec<bool> = m.bits().iter().map(|b| !*b).collect();
    squared_distance_to_sites(m.width(), m.height(), &background, true)
}

/// The foreground pixel farthest from the background: the operational "center"
/// of a mask. Ties go to the smallest `y`, then the smallest `x`.
pub fn distance_transform_argmax(m: &BinaryMask) -> Result<(usize, usize)> {
    let d = squared_distance_to_background(m);
    let mut best: Option<(usize, f64)> = None;
    for (i, (&fg, &dist)) in m.bits().iter().zip(&d).enumerate() {
        // Row-major scan visits smaller y first, then smaller x, so a strict
        // comparison keeps the first maximum.
        if fg && best.map_or(true, |(_, b)| dist > b) {
            best = Some((i, dist));
        }
    }
    let (i, _) = best.ok_or_else(|| Error::degenerate("mask has no foreground pixel"))?;
    Ok((i % m.width(), i / m.width()))
}

/// 4-connected components of the foreground.
#[derive(Clone, Debug)]
pub struct Components {
    /// Per-pixel label, `None` for background. Labels are numbered in order of
    /// each component's first pixel in scanline order.
    pub labels: Vec<Option<usize>>,
    /// Pixel count per label.
    pub sizes: Vec<usize>,
    pub width: usize,
    pub height: usize,
}

impl Components {
    /// Label of the component with the most pixels; ties go to the component
    /// whose first pixel comes first in scanline order.
    pub fn largest(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (label, size) in self.sizes.iter().enumerate() {
            if best.map_or(true, |b| *size > self.sizes[b]) {
                best = Some(label);
            }
        }
        best
    }

    pub fn mask_of(&self, label: usize) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| {
            self.labels[y * self.width + x] == Some(label)
        })
    }
}

pub fn connected_components(m: &BinaryMask) -> Components {
    let (w, h) = m.dims();
    let mut labels: Vec<Option<usize>> = vec![None; w * h];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !m.bits()[start] || labels[start].is_some() {
            continue;
        }
        let label = sizes.len();
        let mut size = 0;
        labels[start] = Some(label);
        stack.push(start);
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if m.bits()[j] && labels[j].is_none() {
                    labels[j] = Some(label);
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        sizes.push(size);
    }
    Components {
        labels,
        sizes,
        width: w,
        height: h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exhaustive oracle: distance to every background pixel and to the
    /// out-of-grid ring, minimum taken by brute force.
    fn brute_sq_dist(m: &BinaryMask, x: usize, y: usize) -> f64 {
        let (w, h) = (m.width() as i64, m.height() as i64);
        let (x, y) = (x as i64, y as i64);
        let mut best = i64::MAX;
        for by in -1..=h {
            for bx in -1..=w {
                let outside = bx < 0 || by < 0 || bx >= w || by >= h;
                if outside || !m.get(bx as usize, by as usize) {
                    best = best.min((bx - x).pow(2) + (by - y).pow(2));
                }
            }
        }
        best as f64
    }

    fn brute_argmax(m: &BinaryMask) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), f64)> = None;
        for y in 0..m.height() {
            for x in 0..m.width() {
                if m.get(x, y) {
                    let d = brute_sq_dist(m, x, y);
                    if best.map_or(true, |(_, b)| d > b) {
                        best = Some(((x, y), d));
                    }
                }
            }
        }
        best.map(|(p, _)| p)
    }

    #[test]
    fn full_square_center() {
        assert_eq!(distance_transform_argmax(&BinaryMask::full(5, 5)).unwrap(), (2, 2));
    }

    #[test]
    fn single_pixel() {
        let m = BinaryMask::from_fn(10, 6, |x, y| (x, y) == (7, 3));
        assert_eq!(distance_transform_argmax(&m).unwrap(), (7, 3));
    }

    #[test]
    fn l_shape_matches_brute_force() {
        // Thick L: vertical bar x in 1..5, y in 1..14; foot y in 10..14, x in 1..12.
        let m = BinaryMask::from_fn(14, 16, |x, y| {
            ((1..5).contains(&x) && (1..14).contains(&y)) || ((1..12).contains(&x) && (10..14).contains(&y))
        });
        let got = distance_transform_argmax(&m).unwrap();
        assert_eq!(Some(got), brute_argmax(&m));
        assert!(m.get(got.0, got.1));
    }

    #[test]
    fn empty_mask_is_degenerate() {
        assert!(matches!(
            distance_transform_argmax(&BinaryMask::empty(3, 3)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn components_ordering_and_largest() {
        let m = BinaryMask::from_fn(8, 4, |x, y| (x < 2 && y < 2) || (x >= 4 && y >= 1));
        let c = connected_components(&m);
        assert_eq!(c.sizes, vec![4, 12]);
        assert_eq!(c.largest(), Some(1));
        // equal sizes: the first in scanline order wins
        let m = BinaryMask::from_fn(6, 1, |x, _| x == 0 || x == 5);
        assert_eq!(connected_components(&m).largest(), Some(0));
    }

    fn arb_mask() -> impl Strategy<Value = BinaryMask> {
        (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<bool>(), w * h)
                .prop_map(move |bits| BinaryMask::new(w, h, bits).unwrap())
        })
    }

    proptest! {
        #[test]
        fn edt_matches_brute_force(m in arb_mask()) {
            let d = squared_distance_to_background(&m);
            for y in 0..m.height() {
                for x in 0..m.width() {
                    let expect = if m.get(x, y) { brute_sq_dist(&m, x, y) } else { 0.0 };
                    prop_assert_eq!(d[y * m.width() + x], expect);
                }
            }
        }

        #[test]
        fn argmax_is_foreground_and_matches_oracle(m in arb_mask()) {
            match distance_transform_argmax(&m) {
                Ok((x, y)) => {
                    prop_assert!(m.get(x, y));
                    prop_assert_eq!(Some((x, y)), brute_argmax(&m));
                }
                Err(_) => prop_assert!(m.is_empty()),
            }
        }
    }
}
