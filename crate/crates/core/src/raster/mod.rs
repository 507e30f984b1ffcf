//! Multi-band rasters, generalized-IHS intensity handling and resampling.
//!
//! Samples are stored band-sequential, row-major: sample `(x, y, b)` lives at
//! `b * width * height + y * width + x`.

mod io;
mod resample;

pub use io::{read_mbr, read_pnm, write_mbr, write_pgm, write_ppm, MBR_MAGIC};
pub use resample::{downsample, upsample};

use crate::error::{dim_err, param_err, Error, Result};
use crate::scalar::{count, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Raster<T> {
    width: usize,
    height: usize,
    bands: usize,
    data: Vec<T>,
}

impl<T: Scalar> Raster<T> {
    /// Wraps band-sequential samples, validating the shape and finiteness.
    pub fn from_vec(width: usize, height: usize, bands: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 || bands == 0 {
            return Err(dim_err!("raster must be at least 1x1x1, got {width}x{height}x{bands}"));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(bands))
            .ok_or_else(|| dim_err!("raster {width}x{height}x{bands} overflows"))?;
        if data.len() != expected {
            return Err(dim_err!(
                "raster {width}x{height}x{bands} needs {expected} samples, got {}",
                data.len()
            ));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite sample at index {i}")));
        }
        Ok(Self { width, height, bands, data })
    }

    /// Builds a raster from one plane per band.
    pub fn from_bands(width: usize, height: usize, planes: Vec<Vec<T>>) -> Result<Self> {
        let bands = planes.len();
        let mut data = Vec::with_capacity(width * height * bands);
        for (b, plane) in planes.into_iter().enumerate() {
            if plane.len() != width * height {
                return Err(dim_err!("band {b} has {} samples, expected {}", plane.len(), width * height));
            }
            data.extend(plane);
        }
        Self::from_vec(width, height, bands, data)
    }

    pub fn filled(width: usize, height: usize, bands: usize, value: T) -> Result<Self> {
        Self::from_vec(width, height, bands, vec![value; width * height * bands])
    }

    /// Evaluates `f(x, y, band)` for every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        bands: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * bands);
        for b in 0..bands {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(x, y, b));
                }
            }
        }
        Self::from_vec(width, height, bands, data)
    }

    /// Internal constructor for results whose shape is known to be valid.
    pub(crate) fn from_parts(width: usize, height: usize, bands: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), width * height * bands);
        Self { width, height, bands, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn plane_len(&self) -> usize {
        self.width * self.height
    }

    pub fn samples(&self) -> &[T] {
        &self.data
    }

    pub fn into_samples(self) -> Vec<T> {
        self.data
    }

    pub fn band(&self, b: usize) -> &[T] {
        let n = self.plane_len();
        &self.data[b * n..(b + 1) * n]
    }

    pub fn planes(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.plane_len())
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, b: usize) -> T {
        self.data[b * self.plane_len() + y * self.width + x]
    }

    /// Extracts a single band as its own raster.
    pub fn band_raster(&self, b: usize) -> Result<Self> {
        if b >= self.bands {
            return Err(dim_err!("band {b} out of range for {}-band raster", self.bands));
        }
        Ok(Self::from_parts(self.width, self.height, 1, self.band(b).to_vec()))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.bands == other.bands
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn ensure_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(dim_err!(
                "{what}: shape {}x{}x{} does not match {}x{}x{}",
                self.width,
                self.height,
                self.bands,
                other.width,
                other.height,
                other.bands
            ))
        }
    }

    pub(crate) fn ensure_single_band(&self, what: &str) -> Result<()> {
        if self.bands == 1 {
            Ok(())
        } else {
            Err(dim_err!("{what} must be single-band, got {} bands", self.bands))
        }
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_parts(self.width, self.height, self.bands, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Combines two equally shaped rasters sample by sample.
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.ensure_same_shape(other, "zip_map")?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_parts(self.width, self.height, self.bands, data))
    }

    pub fn mean(&self) -> T {
        self.data.iter().copied().sum::<T>() / count(self.data.len())
    }

    /// Root mean square of the sample-wise difference `self - other`.
    pub fn rms_diff(&self, other: &Self) -> Result<T> {
        self.ensure_same_shape(other, "rms_diff")?;
        let ss: T = self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b) * (a - b)).sum();
        Ok((ss / count(self.data.len())).sqrt())
    }

    pub fn rms(&self) -> T {
        let ss: T = self.data.iter().map(|&a| a * a).sum();
        (ss / count(self.data.len())).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Clamps every sample to `[0, 1]`; meant for export only.
    pub fn clamp_unit(&self) -> Self {
        self.map(|v| v.max(T::zero()).min(T::one()))
    }

    /// Converts the sample type.
    pub fn cast<U: Scalar>(&self) -> Raster<U> {
        let data = self
            .data
            .iter()
            .map(|v| U::from(*v).expect("finite sample converts"))
            .collect();
        Raster::from_parts(self.width, self.height, self.bands, data)
    }
}

/// Non-negative per-band weights summing to one, defining the intensity component.
#[derive(Clone, Debug, PartialEq)]
pub struct BandWeights<T> {
    weights: Vec<T>,
}

impl<T: Scalar> BandWeights<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(param_err!("band weights must not be empty"));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(param_err!("band weight {w} must be finite and non-negative"));
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - T::one()).abs() > T::simplex_tolerance() {
            return Err(param_err!("band weights sum to {sum}, expected 1"));
        }
        Ok(Self { weights })
    }

    /// Equal weights `1/bands`.
    pub fn uniform(bands: usize) -> Self {
        assert!(bands > 0, "at least one band");
        Self { weights: vec![T::one() / count(bands); bands] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }
}

/// Weighted band sum `I = Σ_b w_b · ms_b`.
pub fn intensity<T: Scalar>(ms: &Raster<T>, w: &BandWeights<T>) -> Result<Raster<T>> {
    if ms.bands() != w.len() {
        return Err(dim_err!("intensity: raster has {} bands, weights have {}", ms.bands(), w.len()));
    }
    let mut out = vec![T::zero(); ms.plane_len()];
    for (plane, &wb) in ms.planes().zip(w.as_slice()) {
        for (o, &v) in out.iter_mut().zip(plane) {
            *o += wb * v;
        }
    }
    Ok(Raster::from_parts(ms.width(), ms.height(), 1, out))
}

/// Adds the single-band `delta` to every band of `ms`.
pub fn inject_detail<T: Scalar>(ms: &Raster<T>, delta: &Raster<T>) -> Result<Raster<T>> {
    delta.ensure_single_band("injected detail")?;
    if !ms.same_grid(delta) {
        return Err(dim_err!(
            "detail {}x{} does not match raster {}x{}",
            delta.width(),
            delta.height(),
            ms.width(),
            ms.height()
        ));
    }
    let d = delta.samples();
    let mut data = Vec::with_capacity(ms.samples().len());
    for plane in ms.planes() {
        data.extend(plane.iter().zip(d).map(|(&v, &dv)| v + dv));
    }
    Ok(Raster::from_parts(ms.width(), ms.height(), ms.bands(), data))
}

/// Additive intensity substitution: `out_b = ms_b + (new_i - old_i)`.
pub fn replace_intensity<T: Scalar>(
    ms: &Raster<T>,
    old_i: &Raster<T>,
    new_i: &Raster<T>,
) -> Result<Raster<T>> {
    old_i.ensure_single_band("old intensity")?;
    new_i.ensure_single_band("new intensity")?;
    let delta = new_i.zip_map(old_i, |n, o| n - o)?;
    inject_detail(ms, &delta)
}

/// Integer scale ratio between a high- and low-resolution grid.
pub(crate) fn scale_ratio<T: Scalar>(lr: &Raster<T>, hr: &Raster<T>) -> Result<usize> {
    let (lw, lh, hw, hh) = (lr.width(), lr.height(), hr.width(), hr.height());
    if hw % lw != 0 || hh % lh != 0 || hw / lw != hh / lh || hw < lw {
        return Err(dim_err!("{hw}x{hh} is not an integer multiple of {lw}x{lh}"));
    }
    Ok(hw / lw)
}
