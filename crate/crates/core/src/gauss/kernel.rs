use rayon::prelude::*;

use crate::boundary::pad_reflect;
use crate::error::{param_err, Result};
use crate::raster::Raster;
use crate::scalar::{count, lit, Scalar};

/// Normalized, separable 2D Gaussian kernel.
///
/// The 2D weights are the outer product of the normalized 1D `taps`, so
/// `weights[i][j] ∝ exp(-((i-r)² + (j-r)²) / (2σ²))` with `r = (size-1)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianKernel<T> {
    size: usize,
    sigma: T,
    taps: Vec<T>,
}

impl<T: Scalar> GaussianKernel<T> {
    /// `size` must be odd. `size == 1` or `sigma == 0` gives the Dirac delta.
    pub fn new(size: usize, sigma: T) -> Result<Self> {
        if size.is_multiple_of(2) {
            return Err(param_err!("kernel size must be odd, got {size}"));
        }
        if !(sigma >= T::zero()) || !sigma.is_finite() {
            return Err(param_err!("kernel sigma must be finite and >= 0, got {sigma}"));
        }
        let r = (size - 1) / 2;
        let taps = if size == 1 || sigma == T::zero() {
            (0..size).map(|i| if i == r { T::one() } else { T::zero() }).collect()
        } else {
            let denom = lit::<T>(2.0) * sigma * sigma;
            let raw: Vec<T> = (0..size)
                .map(|i| {
                    let d = count::<T>(i) - count::<T>(r);
                    (-(d * d) / denom).exp()
                })
                .collect();
            let sum: T = raw.iter().copied().sum();
            raw.into_iter().map(|v| v / sum).collect()
        };
        let sigma = if size == 1 { T::zero() } else { sigma };
        Ok(Self { size, sigma, taps })
    }

    pub fn dirac() -> Self {
        Self { size: 1, sigma: T::zero(), taps: vec![T::one()] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn is_dirac(&self) -> bool {
        self.taps.iter().enumerate().all(|(i, &t)| {
            if i == self.radius() {
                t == T::one()
            } else {
                t == T::zero()
            }
        })
    }

    /// Normalized 1D factor.
    pub fn taps(&self) -> &[T] {
        &self.taps
    }

    /// Row-major `size × size` weight grid.
    pub fn weights(&self) -> Vec<T> {
        let mut w = Vec::with_capacity(self.size * self.size);
        for &a in &self.taps {
            w.extend(self.taps.iter().map(|&b| a * b));
        }
        w
    }
}

/// `make_gaussian(size, sigma)`.
pub fn make_gaussian<T: Scalar>(size: usize, sigma: T) -> Result<GaussianKernel<T>> {
    GaussianKernel::new(size, sigma)
}

/// Separable correlation of one plane with reflect padding.
pub(crate) fn convolve_plane<T: Scalar>(plane: &[T], width: usize, height: usize, taps: &[T]) -> Vec<T> {
    let r = taps.len() / 2;
    if taps.iter().enumerate().all(|(i, &t)| t == if i == r { T::one() } else { T::zero() }) {
        return plane.to_vec();
    }
    let mut tmp = vec![T::zero(); width * height];
    let mut padded = Vec::with_capacity(width.max(height) + 2 * r);
    for y in 0..height {
        pad_reflect(&plane[y * width..(y + 1) * width], r, &mut padded);
        let row = &mut tmp[y * width..(y + 1) * width];
        for (x, o) in row.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (k, &t) in taps.iter().enumerate() {
                acc += t * padded[x + k];
            }
            *o = acc;
        }
    }
    // vertical pass accumulates whole rows so the inner loop is contiguous
    let mut out = vec![T::zero(); width * height];
    let mut src_rows = Vec::with_capacity(height + 2 * r);
    pad_reflect(&(0..height).collect::<Vec<_>>(), r, &mut src_rows);
    for y in 0..height {
        let dst = &mut out[y * width..(y + 1) * width];
        for (k, &t) in taps.iter().enumerate() {
            let sy = src_rows[y + k];
            let src = &tmp[sy * width..(sy + 1) * width];
            for (o, &v) in dst.iter_mut().zip(src) {
                *o += t * v;
            }
        }
    }
    out
}

/// Per-band 2D correlation with reflect boundary; output has the input's shape.
pub fn convolve<T: Scalar>(r: &Raster<T>, k: &GaussianKernel<T>) -> Raster<T> {
    let planes: Vec<Vec<T>> = r
        .planes()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|p| convolve_plane(p, r.width(), r.height(), k.taps()))
        .collect();
    Raster::from_parts(r.width(), r.height(), r.bands(), planes.concat())
}
