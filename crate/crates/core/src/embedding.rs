//! Feature vectors and patch feature grids.

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// A finite, non-empty feature vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding<T> {
    values: Vec<T>,
}

impl<T: Scalar> Embedding<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::contract("embedding dimension must be positive"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "embedding component {i} is not finite"
            )));
        }
        Ok(Self { values })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        Self {
            values: vec![T::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn norm(&self) -> T {
        dot(&self.values, &self.values).sqrt()
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            values: self.values.iter().map(|v| *v * k).collect(),
        }
    }

    /// Unit-norm copy; fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == T::zero() {
            return Err(Error::degenerate("cannot normalize a zero vector"));
        }
        Ok(self.scaled(T::one() / n))
    }
}

/// Cosine similarity `a·b / (‖a‖‖b‖)`.
///
/// All reductions run left to right, and the only asymmetric step
/// (the product of the norms) is commutative in IEEE arithmetic, so the
/// result is bit-identical under argument swap.
pub fn cosine_similarity<T: Scalar>(a: &Embedding<T>, b: &Embedding<T>) -> Result<T> {
    cosine_slices(a.values(), b.values())
}

pub(crate) fn cosine_slices<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::contract(format!(
            "embedding dimensions differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == T::zero() || nb == T::zero() {
        return Err(Error::degenerate("cosine similarity of a zero vector"));
    }
    let c = dot(a, b) / (na * nb);
    // Rounding can push |c| a hair past 1.
    Ok(c.max(-T::one()).min(T::one()))
}

/// Dense `cols x rows` grid of `dim`-dimensional patch features, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureGrid<T> {
    cols: usize,
    rows: usize,
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> FeatureGrid<T> {
    pub fn new(cols: usize, rows: usize, dim: usize, data: Vec<T>) -> Result<Self> {
        if cols == 0 || rows == 0 || dim == 0 {
            return Err(Error::contract("feature grid dimensions must be positive"));
        }
        if data.len() != cols * rows * dim {
            return Err(Error::contract(format!(
                "feature grid {cols}x{rows}x{dim} needs {} values, got {}",
                cols * rows * dim,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("feature grid contains non-finite values".into()));
        }
        Ok(Self {
            cols,
            rows,
            dim,
            data,
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn patch(&self, index: usize) -> &[T] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    pub fn patches(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// The whole grid flattened into one frame-level embedding.
    pub fn flatten(&self) -> Embedding<T> {
        Embedding {
            values: self.data.clone(),
        }
    }
}
