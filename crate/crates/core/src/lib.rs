//! Pan-sharpening by alternating reverse filtering.
//!
//! A low-resolution multispectral raster and a high-resolution panchromatic
//! raster are fused by two interleaved fixed-point iterations
//! `x ← x + y − F(x)`, one per branch, where each `F` is a fixed multi-scale
//! Gaussian filter bank whose contraction constant can be certified in the
//! frequency domain. Classical component-substitution fusers, a Wald-protocol
//! simulator and the usual reference / no-reference quality metrics are
//! provided alongside.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below name the common instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arf;
pub mod baselines;
mod boundary;
pub mod error;
pub mod gauss;
pub mod metrics;
pub mod raster;
pub mod scalar;
pub mod wald;

pub use arf::{arf_fuse, consistency_residual, reverse_step, tune_gammas, FusionResult, IterationConfig, IterationTrace};
pub use baselines::{fuse_brovey, fuse_gs, fuse_ihs, fuse_sfim, fuse_upsample};
pub use error::{Error, Result};
pub use gauss::{
    apply_multiscale, contraction_constant, convolve, make_gaussian, BankConfig, ContractionReport,
    GaussianKernel, MultiScaleFilter, SigmaRule,
};
pub use raster::{
    downsample, intensity, inject_detail, replace_intensity, upsample, BandWeights, Raster,
};
pub use metrics::{ergas, evaluate, loss_values, psnr, q_index, qnr_suite, sam, scc, ssim, MetricReport};
pub use scalar::Scalar;
pub use wald::{make_scene, simulate, SceneKind, WaldConfig, WaldScene};

pub type Raster32 = Raster<f32>;
pub type Raster64 = Raster<f64>;
pub type BandWeights64 = BandWeights<f64>;
pub type MultiScaleFilter32 = MultiScaleFilter<f32>;
pub type MultiScaleFilter64 = MultiScaleFilter<f64>;
pub type GaussianKernel64 = GaussianKernel<f64>;
pub type FusionResult64 = FusionResult<f64>;
pub type WaldConfig64 = WaldConfig<f64>;
