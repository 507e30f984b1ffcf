//! Gaussian kernels, multi-scale Gaussian filter banks and the spectral
//! contraction verifier.

mod bank;
mod contraction;
mod kernel;

pub use bank::{apply_multiscale, BankConfig, MultiScaleFilter, SigmaRule};
pub use contraction::{contraction_constant, transfer_function, ContractionReport};
pub use kernel::{convolve, make_gaussian, GaussianKernel};

