//! Hard and soft per-pixel masks.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// IoU reported when both masks are empty. Both predictions agree that the
/// target is absent, which common VOS evaluators score as a perfect match.
pub const EMPTY_IOU: f64 = 1.0;

/// Row-major boolean grid.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::contract(format!(
                "mask dimensions must be positive, got {width}x{height}"
            )));
        }
        if bits.len() != width * height {
            return Err(Error::contract(format!(
                "mask of {width}x{height} needs {} bits, got {}",
                width * height,
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    /// All-background mask.
    ///
    /// # Panics
    /// Panics if either dimension is zero.
    pub fn empty(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    /// All-foreground mask.
    pub fn full(width: usize, height: usize) -> Self {
        let mut m = Self::empty(width, height);
        m.bits.fill(true);
        m
    }

    /// Builds a mask from a predicate over `(x, y)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::empty(width, height);
        for y in 0..height {
            for x in 0..width {
                m.bits[y * width + x] = f(x, y);
            }
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn area(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn same_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::contract(format!(
                "mask dimensions differ: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }

    /// Converts to a soft mask with values in {0, 1}.
    pub fn to_soft<T: Scalar>(&self) -> SoftMask<T> {
        SoftMask {
            width: self.width,
            height: self.height,
            values: self
                .bits
                .iter()
                .map(|b| if *b { T::one() } else { T::zero() })
                .collect(),
        }
    }

    /// Bounding box `(x_min, y_min, x_max, y_max)` of the foreground, inclusive.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bbox: Option<(usize, usize, usize, usize)> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    bbox = Some(match bbox {
                        None => (x, y, x, y),
                        Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                    });
                }
            }
        }
        bbox
    }
}

impl std::fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryMask {}x{}", self.width, self.height)?;
        for y in 0..self.height {
            let row: String = (0..self.width)
                .map(|x| if self.get(x, y) { '#' } else { '.' })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Row-major per-pixel probabilities in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftMask<T> {
    width: usize,
    height: usize,
    values: Vec<T>,
}

impl<T: Scalar> SoftMask<T> {
    pub fn new(width: usize, height: usize, values: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::contract(format!(
                "mask dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::contract(format!(
                "soft mask of {width}x{height} needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        if let Some(bad) = values
            .iter()
            .find(|v| !(**v >= T::zero() && **v <= T::one()))
        {
            return Err(Error::contract(format!(
                "soft mask value {bad} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.values[y * self.width + x]
    }

    pub fn threshold(&self, cut: T) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.values.iter().map(|v| *v >= cut).collect(),
        }
    }

    /// Foreground at the conventional 0.5 cut.
    pub fn binarize(&self) -> BinaryMask {
        self.threshold(T::of(0.5))
    }

    pub fn has_foreground(&self) -> bool {
        let half = T::of(0.5);
        self.values.iter().any(|v| *v >= half)
    }
}

/// Intersection over union of two same-sized masks, `EMPTY_IOU` when both are empty.
pub fn mask_iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    mask_iou_with(a, b, EMPTY_IOU)
}

/// `mask_iou` with an explicit value for the empty/empty case.
pub fn mask_iou_with(a: &BinaryMask, b: &BinaryMask, empty_value: f64) -> Result<f64> {
    a.same_dims(b)?;
    let mut inter = 0usize;
    let mut union = 0usize;
    for (p, q) in a.bits.iter().zip(&b.bits) {
        inter += usize::from(*p && *q);
        union += usize::from(*p || *q);
    }
    if union == 0 {
        return Ok(empty_value);
    }
    Ok(inter as f64 / union as f64)
}
