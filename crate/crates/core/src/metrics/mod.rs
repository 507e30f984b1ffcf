//! Reference and no-reference quality metrics, plus the training-loss
//! values reported as diagnostics.

mod reference;
mod report;

pub use reference::{
    ergas, psnr, q_index, sam, scc, ssim, uiqi_plane, SccValue, PSNR_CAP_DB, Q_WINDOW, SSIM_SIGMA,
    SSIM_WINDOW,
};
pub use report::{evaluate, EvalInputs, MetricReport, ReportMeta, CSV_HEADER};

use crate::error::{dim_err, param_err, Result};
use crate::raster::{scale_ratio, Raster};
use crate::scalar::{count, Scalar};
use crate::wald::{degrade, WaldConfig};

/// No-reference distortion indices and their product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Qnr<T> {
    /// `None` for single-band inputs.
    pub d_lambda: Option<T>,
    pub d_s: T,
    pub qnr: Option<T>,
}

fn clamp01<T: Scalar>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// `(1 − D_λ)(1 − D_s)`, clamped to `[0, 1]`.
pub fn qnr_from<T: Scalar>(d_lambda: T, d_s: T) -> T {
    clamp01((T::one() - d_lambda) * (T::one() - d_s))
}

/// Low-resolution PAN used by `D_s`: the Wald blur and decimation at the
/// fusion ratio.
pub fn degrade_pan<T: Scalar>(pan: &Raster<T>, ratio: usize) -> Result<Raster<T>> {
    degrade(pan, &WaldConfig::with_ratio(ratio, 1))
}

/// `D_λ`, `D_s` and `QNR = (1 − D_λ)(1 − D_s)`.
pub fn qnr_suite<T: Scalar>(fused: &Raster<T>, lr: &Raster<T>, pan: &Raster<T>) -> Result<Qnr<T>> {
    pan.ensure_single_band("PAN")?;
    if !fused.same_grid(pan) {
        return Err(dim_err!("fused raster and PAN differ in size"));
    }
    if fused.bands() != lr.bands() {
        return Err(dim_err!("fused has {} bands, LR has {}", fused.bands(), lr.bands()));
    }
    let ratio = scale_ratio(lr, pan)?;
    if lr.width() < Q_WINDOW || lr.height() < Q_WINDOW {
        return Err(dim_err!("LR raster must be at least {Q_WINDOW}x{Q_WINDOW} for Q"));
    }
    let bands = fused.bands();
    let (fw, fh) = (fused.width(), fused.height());
    let (lw, lh) = (lr.width(), lr.height());

    let d_lambda = (bands >= 2).then(|| {
        let mut acc = T::zero();
        for i in 0..bands {
            for j in 0..bands {
                if i != j {
                    let qf = uiqi_plane(fused.band(i), fused.band(j), fw, fh);
                    let ql = uiqi_plane(lr.band(i), lr.band(j), lw, lh);
                    acc += (qf - ql).abs();
                }
            }
        }
        clamp01(acc / count(bands * (bands - 1)))
    });

    let pan_lr = degrade_pan(pan, ratio)?;
    let mut acc = T::zero();
    for b in 0..bands {
        let qf = uiqi_plane(fused.band(b), pan.band(0), fw, fh);
        let ql = uiqi_plane(lr.band(b), pan_lr.band(0), lw, lh);
        acc += (qf - ql).abs();
    }
    let d_s = clamp01(acc / count(bands));
    let qnr = d_lambda.map(|dl| qnr_from(dl, d_s));
    Ok(Qnr { d_lambda, d_s, qnr })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossValues<T> {
    pub l_r: T,
    pub l_s: T,
    pub l_sum: T,
}

/// `l_r = RMS(fused − gt)`, `l_s = 1 − ssim(fused_i, gt_i)`, `l_sum = l_r + λ·l_s`.
pub fn loss_values<T: Scalar>(
    fused: &Raster<T>,
    fused_i: &Raster<T>,
    gt: &Raster<T>,
    gt_i: &Raster<T>,
    lambda: T,
) -> Result<LossValues<T>> {
    if !(lambda >= T::zero()) {
        return Err(param_err!("loss weight must be >= 0, got {lambda}"));
    }
    let l_r = fused.rms_diff(gt)?;
    let l_s = T::one() - ssim(fused_i, gt_i)?;
    Ok(LossValues { l_r, l_s, l_sum: l_r + lambda * l_s })
}
