//! The alternating reverse-filtering engine.
//!
//! Two fixed-point iterations of the form `x ← x + y − F(x)` are interleaved:
//! the multispectral branch pulls `f(H)` towards the upsampled LR raster, the
//! intensity branch pulls `g(H_I)` towards the PAN, and the enhanced intensity
//! is substituted back into the multispectral estimate after every step.

mod trace;
mod tune;

pub use trace::{sig9, IterationTrace, TraceStep};
pub use tune::{tune_gammas, TuneConfig, TuneResult};

use crate::error::{dim_err, param_err, Error, Result};
use crate::gauss::{apply_multiscale, MultiScaleFilter};
use crate::raster::{intensity, replace_intensity, scale_ratio, upsample, BandWeights, Raster};
use crate::scalar::{to_f64, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct IterationConfig {
    /// Number of outer iterations `K`.
    pub iterations: usize,
    /// Stop once `‖H^{k+1} − H^k‖_RMS` falls below this; `0` disables.
    pub residual_tolerance: f64,
    pub record_trace: bool,
    /// Reverse-filtering steps of the intensity branch per outer iteration.
    pub pan_steps: usize,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self { iterations: 5, residual_tolerance: 0.0, record_trace: true, pan_steps: 1 }
    }
}

impl IterationConfig {
    pub fn with_iterations(iterations: usize) -> Self {
        Self { iterations, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(param_err!("iteration count must be >= 1"));
        }
        if self.pan_steps == 0 {
            return Err(param_err!("pan branch needs at least one step per iteration"));
        }
        if !(self.residual_tolerance >= 0.0) {
            return Err(param_err!("residual tolerance must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusionResult<T> {
    /// `H^K`.
    pub fused: Raster<T>,
    /// `H̃_I^K`.
    pub intensity_estimate: Raster<T>,
    pub trace: IterationTrace,
    /// `‖L̂ − f(H^K)‖_RMS`.
    pub final_ms_residual: f64,
    /// Outer iterations actually executed.
    pub iterations: usize,
}

fn require_finite<T: Scalar>(r: &Raster<T>, step: &str, k: usize) -> Result<()> {
    if r.is_finite() {
        Ok(())
    } else {
        Err(Error::Numeric(format!("non-finite values after {step} in iteration {k}")))
    }
}

/// `y − F(x)`.
fn defect<T: Scalar>(x: &Raster<T>, y: &Raster<T>, filter: &MultiScaleFilter<T>) -> Result<Raster<T>> {
    y.zip_map(&apply_multiscale(x, filter), |a, b| a - b)
}

/// `x + y − F(x)`, evaluated as `y + (x − F(x))` so an identity `F` returns
/// `y` bit for bit. Also returns `F(x)`.
fn step_with<T: Scalar>(
    x: &Raster<T>,
    y: &Raster<T>,
    filter: &MultiScaleFilter<T>,
) -> Result<(Raster<T>, Raster<T>)> {
    let fx = apply_multiscale(x, filter);
    let hp = x.zip_map(&fx, |a, b| a - b)?;
    Ok((y.zip_map(&hp, |a, d| a + d)?, fx))
}

/// One reverse-filtering step `x + y − F(x)`.
pub fn reverse_step<T: Scalar>(x: &Raster<T>, y: &Raster<T>, filter: &MultiScaleFilter<T>) -> Result<Raster<T>> {
    x.ensure_same_shape(y, "reverse_step")?;
    Ok(step_with(x, y, filter)?.0)
}

/// RMS of `l_up − f(h)`.
pub fn consistency_residual<T: Scalar>(h: &Raster<T>, l_up: &Raster<T>, f_bank: &MultiScaleFilter<T>) -> Result<T> {
    h.ensure_same_shape(l_up, "consistency_residual")?;
    Ok(defect(h, l_up, f_bank)?.rms())
}

/// Runs the alternating reverse filter on LR multispectral `lr` and PAN `pan`.
pub fn arf_fuse<T: Scalar>(
    lr: &Raster<T>,
    pan: &Raster<T>,
    f_bank: &MultiScaleFilter<T>,
    g_bank: &MultiScaleFilter<T>,
    weights: &BandWeights<T>,
    cfg: &IterationConfig,
) -> Result<FusionResult<T>> {
    cfg.validate()?;
    pan.ensure_single_band("PAN")?;
    if lr.bands() != weights.len() {
        return Err(dim_err!("LR raster has {} bands, weights have {}", lr.bands(), weights.len()));
    }
    let scale = scale_ratio(lr, pan)?;
    let l_up = upsample(lr, scale)?;
    let mut h = l_up.clone();
    let mut intensity_est = intensity(&h, weights)?;
    let mut trace = IterationTrace::default();
    let mut executed = 0;

    for k in 0..cfg.iterations {
        // H^{k+1/2} = H^k + L̂ − f(H^k)
        let (half, fh) = step_with(&h, &l_up, f_bank)?;
        let ms_residual = to_f64(l_up.zip_map(&fh, |a, b| a - b)?.rms());
        require_finite(&half, "the multispectral step", k)?;

        // H̃_I^k is re-fetched from the half step, then reverse filtered against P
        let fetched = intensity(&half, weights)?;
        let mut current = fetched.clone();
        let mut pan_residual = 0.0;
        for step in 0..cfg.pan_steps {
            let (next_i, gi) = step_with(&current, pan, g_bank)?;
            if step == 0 {
                pan_residual = to_f64(pan.zip_map(&gi, |a, b| a - b)?.rms());
            }
            current = next_i;
        }
        require_finite(&current, "the intensity step", k)?;

        // H^{k+1} = H^{k+1/2} with its intensity replaced by H̃_I^{k+1}
        let next = replace_intensity(&half, &fetched, &current)?;
        require_finite(&next, "intensity substitution", k)?;

        let delta = to_f64(next.rms_diff(&h)?);
        if cfg.record_trace {
            trace.push(k, ms_residual, pan_residual, delta);
        }
        h = next;
        intensity_est = current;
        executed = k + 1;
        if cfg.residual_tolerance > 0.0 && delta < cfg.residual_tolerance {
            break;
        }
    }

    let final_ms_residual = to_f64(consistency_residual(&h, &l_up, f_bank)?);
    Ok(FusionResult { fused: h, intensity_estimate: intensity_est, trace, final_ms_residual, iterations: executed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{convolve, make_gaussian, SigmaRule};
    use crate::raster::downsample;
    use crate::wald::{make_scene, simulate, SceneKind, WaldConfig};

    fn bank(m: usize) -> MultiScaleFilter<f64> {
        MultiScaleFilter::uniform(m, SigmaRule::Quarter).unwrap()
    }

    #[test]
    fn reverse_step_with_identity_returns_target() {
        let x: Raster<f64> = make_scene(SceneKind::Blobs, 32, 32, 2, 1).unwrap();
        let y: Raster<f64> = make_scene(SceneKind::Checker, 32, 32, 2, 2).unwrap();
        assert_eq!(reverse_step(&x, &y, &MultiScaleFilter::dirac()).unwrap(), y);
    }

    #[test]
    fn constants_are_fixed_points() {
        let y = Raster::filled(16, 16, 3, 0.35f64).unwrap();
        let out = reverse_step(&y, &y, &bank(9)).unwrap();
        assert!(out.rms_diff(&y).unwrap() < 1e-14);
    }

    #[test]
    fn reverse_step_dimension_mismatch() {
        let a = Raster::filled(8, 8, 1, 0.0f64).unwrap();
        let b = Raster::filled(8, 8, 2, 0.0f64).unwrap();
        assert!(matches!(reverse_step(&a, &b, &bank(3)), Err(Error::Dimension(_))));
        assert!(consistency_residual(&a, &b, &bank(3)).is_err());
    }

    #[test]
    fn iteration_inverts_known_blur() {
        let truth: Raster<f64> = make_scene(SceneKind::Blobs, 32, 32, 1, 3).unwrap();
        let g = make_gaussian(5, 1.0).unwrap();
        let mut kernels = vec![crate::gauss::GaussianKernel::dirac(), make_gaussian(3, 0.0).unwrap()];
        kernels.push(g.clone());
        let f = MultiScaleFilter::new(kernels, vec![0.0, 0.0, 1.0]).unwrap();
        let y = convolve(&truth, &g);
        let mut x = y.clone();
        for _ in 0..50 {
            x = reverse_step(&x, &y, &f).unwrap();
        }
        let rel = consistency_residual(&x, &y, &f).unwrap() / y.rms();
        assert!(rel < 1e-3, "relative residual {rel}");
    }

    #[test]
    fn constant_scene_is_a_fixed_point() {
        let lr = Raster::filled(8, 8, 4, 0.45f64).unwrap();
        let pan = Raster::filled(32, 32, 1, 0.45).unwrap();
        let out = arf_fuse(&lr, &pan, &bank(17), &bank(17), &BandWeights::uniform(4), &IterationConfig::default()).unwrap();
        assert!(out.fused.samples().iter().all(|v| (v - 0.45).abs() < 1e-12));
        assert!(out.final_ms_residual < 1e-12);
        assert_eq!(out.trace.len(), 5);
    }

    #[test]
    fn dirac_banks_give_one_step_substitution() {
        let gt: Raster<f64> = make_scene(SceneKind::Blobs, 64, 64, 4, 4).unwrap();
        let scene = simulate(gt, &WaldConfig::standard(4)).unwrap();
        let w = BandWeights::uniform(4);
        let d = MultiScaleFilter::dirac();
        let out = arf_fuse(&scene.lr, &scene.pan, &d, &d, &w, &IterationConfig::with_iterations(1)).unwrap();
        let back = intensity(&out.fused, &w).unwrap();
        assert!(back.rms_diff(&scene.pan).unwrap() < 1e-12);
        assert!(out.intensity_estimate.rms_diff(&scene.pan).unwrap() < 1e-15);
        let l_up = upsample(&scene.lr, 4).unwrap();
        let expected = crate::raster::replace_intensity(&l_up, &intensity(&l_up, &w).unwrap(), &scene.pan).unwrap();
        assert_eq!(out.fused, expected);
    }

    #[test]
    fn output_contract_and_determinism() {
        let gt: Raster<f64> = make_scene(SceneKind::TextLike, 64, 64, 3, 5).unwrap();
        let scene = simulate(gt, &WaldConfig::standard(3)).unwrap();
        let w = BandWeights::uniform(3);
        let run = || arf_fuse(&scene.lr, &scene.pan, &bank(9), &bank(5), &w, &IterationConfig::default()).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        assert_eq!((a.fused.width(), a.fused.height(), a.fused.bands()), (64, 64, 3));
        assert_eq!(a.trace.steps[0].ratio, None);
        assert!(a.trace.steps[1].ratio.is_some());
    }

    #[test]
    fn input_validation() {
        let lr = Raster::filled(8, 8, 4, 0.5f64).unwrap();
        let w = BandWeights::uniform(4);
        let cfg = IterationConfig::default();
        let bad_pan = Raster::filled(30, 30, 1, 0.5).unwrap();
        assert!(matches!(arf_fuse(&lr, &bad_pan, &bank(3), &bank(3), &w, &cfg), Err(Error::Dimension(_))));
        let multi_pan = Raster::filled(32, 32, 2, 0.5).unwrap();
        assert!(arf_fuse(&lr, &multi_pan, &bank(3), &bank(3), &w, &cfg).is_err());
        let pan = Raster::filled(32, 32, 1, 0.5).unwrap();
        assert!(arf_fuse(&lr, &pan, &bank(3), &bank(3), &BandWeights::uniform(3), &cfg).is_err());
        assert!(arf_fuse(&lr, &pan, &bank(3), &bank(3), &w, &IterationConfig::with_iterations(0)).is_err());
    }

    #[test]
    fn early_stop_on_tolerance() {
        let lr = Raster::filled(8, 8, 2, 0.5f64).unwrap();
        let pan = Raster::filled(32, 32, 1, 0.5).unwrap();
        let cfg = IterationConfig { residual_tolerance: 1e-9, ..IterationConfig::with_iterations(10) };
        let out = arf_fuse(&lr, &pan, &bank(5), &bank(5), &BandWeights::uniform(2), &cfg).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.trace.len(), 1);
    }

    #[test]
    fn extra_pan_steps_are_pure_intensity_moves() {
        let gt: Raster<f64> = make_scene(SceneKind::Blobs, 64, 64, 2, 6).unwrap();
        let scene = simulate(gt, &WaldConfig::standard(2)).unwrap();
        let w = BandWeights::uniform(2);
        let cfg = IterationConfig { pan_steps: 3, ..IterationConfig::with_iterations(2) };
        let out = arf_fuse(&scene.lr, &scene.pan, &bank(5), &bank(5), &w, &cfg).unwrap();
        let back = intensity(&out.fused, &w).unwrap();
        assert!(back.rms_diff(&out.intensity_estimate).unwrap() < 1e-12);
    }

    #[test]
    fn upsampled_input_and_decimation_agree() {
        let lr = Raster::from_fn(8, 8, 2, |x, y, b| ((x + 2 * y + b) % 5) as f64 / 5.0).unwrap();
        let pan = Raster::filled(32, 32, 1, 0.5).unwrap();
        let out = arf_fuse(&lr, &pan, &MultiScaleFilter::dirac(), &MultiScaleFilter::dirac(), &BandWeights::uniform(2), &IterationConfig::with_iterations(1)).unwrap();
        let l_up = upsample(&lr, 4).unwrap();
        assert_eq!(downsample(&l_up, 4).unwrap(), lr);
        assert_eq!(out.fused.width(), 32);
    }
}
