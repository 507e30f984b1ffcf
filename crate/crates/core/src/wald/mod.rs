//! Wald-protocol simulation: from a reference high-resolution multispectral
//! raster, produce the low-resolution multispectral input and the
//! panchromatic input that a fuser sees, keeping the reference as ground truth.

mod scene;

pub use scene::{make_scene, make_scene_with_gains, SceneKind, MIN_SCENE_SIZE};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{dim_err, param_err, Result};
use crate::gauss::{convolve, GaussianKernel};
use crate::raster::{downsample, intensity, BandWeights, Raster};
use crate::scalar::{lit, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct WaldConfig<T> {
    /// Resolution ratio `s` between PAN and MS grids.
    pub ratio: usize,
    /// Standard deviation of the anti-alias blur, in high-resolution pixels.
    pub blur_sigma: f64,
    /// Band weights that synthesize the PAN from the reference.
    pub pan_weights: BandWeights<T>,
    /// Standard deviation of additive Gaussian noise on the LR raster.
    pub noise_sigma: f64,
    pub noise_seed: u64,
}

impl<T: Scalar> WaldConfig<T> {
    /// Ratio 4, blur σ = ratio/2, uniform PAN weights, no noise.
    pub fn standard(bands: usize) -> Self {
        Self::with_ratio(4, bands)
    }

    pub fn with_ratio(ratio: usize, bands: usize) -> Self {
        Self {
            ratio,
            blur_sigma: ratio as f64 / 2.0,
            pan_weights: BandWeights::uniform(bands),
            noise_sigma: 0.0,
            noise_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ratio < 2 {
            return Err(param_err!("Wald ratio must be >= 2, got {}", self.ratio));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(param_err!("noise sigma must be finite and >= 0, got {}", self.noise_sigma));
        }
        if !(self.blur_sigma >= 0.0) || !self.blur_sigma.is_finite() {
            return Err(param_err!("blur sigma must be finite and >= 0, got {}", self.blur_sigma));
        }
        Ok(())
    }

    /// Blur kernel of size `2·ceil(3σ) + 1`.
    pub fn blur_kernel(&self) -> Result<GaussianKernel<T>> {
        let size = 2 * (3.0 * self.blur_sigma).ceil() as usize + 1;
        GaussianKernel::new(size, lit(self.blur_sigma))
    }
}

/// Gaussian blur → decimation by `ratio` → optional seeded Gaussian noise.
pub fn degrade<T: Scalar>(h: &Raster<T>, cfg: &WaldConfig<T>) -> Result<Raster<T>> {
    cfg.validate()?;
    if !h.width().is_multiple_of(cfg.ratio) || !h.height().is_multiple_of(cfg.ratio) {
        return Err(dim_err!(
            "{}x{} raster is not divisible by ratio {}",
            h.width(),
            h.height(),
            cfg.ratio
        ));
    }
    let blurred = convolve(h, &cfg.blur_kernel()?);
    let lr = downsample(&blurred, cfg.ratio)?;
    if cfg.noise_sigma == 0.0 {
        return Ok(lr);
    }
    let normal = Normal::new(0.0, cfg.noise_sigma).map_err(|e| param_err!("noise: {e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.noise_seed);
    let noisy: Vec<T> = lr
        .samples()
        .iter()
        .map(|&v| v + lit::<T>(normal.sample(&mut rng)))
        .collect();
    Raster::from_vec(lr.width(), lr.height(), lr.bands(), noisy)
}

/// PAN = weighted band sum at full resolution.
pub fn synth_pan<T: Scalar>(h: &Raster<T>, cfg: &WaldConfig<T>) -> Result<Raster<T>> {
    intensity(h, &cfg.pan_weights)
}

/// Reference / LR MS / PAN triple.
#[derive(Clone, Debug, PartialEq)]
pub struct WaldScene<T> {
    pub gt: Raster<T>,
    pub lr: Raster<T>,
    pub pan: Raster<T>,
}

pub fn simulate<T: Scalar>(gt: Raster<T>, cfg: &WaldConfig<T>) -> Result<WaldScene<T>> {
    let lr = degrade(&gt, cfg)?;
    let pan = synth_pan(&gt, cfg)?;
    Ok(WaldScene { gt, lr, pan })
}
