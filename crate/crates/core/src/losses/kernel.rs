use crate::error::{Error, Result};
use crate::mask::{BinaryMask, SoftMask};
use crate::scalar::Scalar;

/// Truncated isotropic Gaussian on a `size x size` support, renormalized so
/// the weights sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianKernel<T> {
    sigma: T,
    size: usize,
    weights: Vec<T>,
}

impl<T: Scalar> GaussianKernel<T> {
    pub fn new(sigma: T, size: usize) -> Result<Self> {
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(Error::contract(format!("kernel sigma must be positive, got {sigma}")));
        }
        if size % 2 == 0 {
            return Err(Error::contract(format!("kernel size must be odd, got {size}")));
        }
        let r = (size / 2) as isize;
        let mut weights = Vec::with_capacity(size * size);
        for dv in -r..=r {
            for du in -r..=r {
                weights.push(Self::density(sigma, du, dv));
            }
        }
        let mut total = T::zero();
        for w in &weights {
            total += *w;
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(Self { sigma, size, weights })
    }

    /// Continuous density `exp(-(u²+v²)/2σ²) / (2πσ²)` at an integer offset.
    pub fn density(sigma: T, du: isize, dv: isize) -> T {
        let two = T::of(2.0);
        let s2 = sigma * sigma;
        let r2 = T::of((du * du + dv * dv) as f64);
        (-r2 / (two * s2)).exp() / (two * T::of(std::f64::consts::PI) * s2)
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Normalized weight at offset `(du, dv)` from the center.
    pub fn weight(&self, du: isize, dv: isize) -> T {
        let r = self.radius() as isize;
        self.weights[((dv + r) as usize) * self.size + (du + r) as usize]
    }
}

/// Convolves a hard label with the kernel, replicating border pixels.
pub fn gaussian_soften<T: Scalar>(y: &BinaryMask, k: &GaussianKernel<T>) -> SoftMask<T> {
    let (w, h) = y.dims();
    let r = k.radius() as isize;
    let clamp = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;
    let mut out = Vec::with_capacity(w * h);
    for v in 0..h as isize {
        for u in 0..w as isize {
            let mut acc = T::zero();
            for dv in -r..=r {
                let yy = clamp(v - dv, h);
                for du in -r..=r {
                    if y.get(clamp(u - du, w), yy) {
                        acc += k.weight(du, dv);
                    }
                }
            }
            out.push(acc.min(T::one()));
        }
    }
    SoftMask::new(w, h, out).expect("convolution of a {0,1} mask with a unit-sum kernel stays in [0, 1]")
}
