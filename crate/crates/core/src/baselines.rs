//! Classical component-substitution and ratio fusers.
//!
//! Each takes the LR multispectral raster, the PAN and the band weights of
//! the intensity proxy, and returns a raster on the PAN grid.

use crate::boundary::reflect;
use crate::error::Result;
use crate::raster::{intensity, replace_intensity, scale_ratio, upsample, BandWeights, Raster};
use crate::scalar::{count, lit, Scalar};

/// Ratio denominators at or below this pass the pixel through unchanged.
pub const RATIO_EPS: f64 = 1e-6;
const GS_MIN_VARIANCE: f64 = 1e-12;

struct Prepared<T> {
    up: Raster<T>,
    i: Raster<T>,
    ratio: usize,
}

fn prepare<T: Scalar>(lr: &Raster<T>, pan: &Raster<T>, w: &BandWeights<T>) -> Result<Prepared<T>> {
    pan.ensure_single_band("PAN")?;
    let ratio = scale_ratio(lr, pan)?;
    let up = upsample(lr, ratio)?;
    let i = intensity(&up, w)?;
    Ok(Prepared { up, i, ratio })
}

/// Bicubic upsampling to the PAN grid, no detail injection.
pub fn fuse_upsample<T: Scalar>(lr: &Raster<T>, pan: &Raster<T>) -> Result<Raster<T>> {
    pan.ensure_single_band("PAN")?;
    upsample(lr, scale_ratio(lr, pan)?)
}

/// `Ĥ_b + (P − I)` on every band.
pub fn fuse_ihs<T: Scalar>(lr: &Raster<T>, pan: &Raster<T>, w: &BandWeights<T>) -> Result<Raster<T>> {
    let p = prepare(lr, pan, w)?;
    replace_intensity(&p.up, &p.i, pan)
}

/// Multiplies each band by `P / I` where `I` exceeds [`RATIO_EPS`].
fn modulate<T: Scalar>(up: &Raster<T>, num: &[T], den: &[T]) -> Raster<T> {
    let eps: T = lit(RATIO_EPS);
    let n = up.plane_len();
    let data = up
        .samples()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let d = den[k % n];
            if d > eps {
                v * num[k % n] / d
            } else {
                v
            }
        })
        .collect();
    Raster::from_parts(up.width(), up.height(), up.bands(), data)
}

/// `Ĥ_b · P / I`.
pub fn fuse_brovey<T: Scalar>(lr: &Raster<T>, pan: &Raster<T>, w: &BandWeights<T>) -> Result<Raster<T>> {
    let p = prepare(lr, pan, w)?;
    Ok(modulate(&p.up, pan.samples(), p.i.samples()))
}

/// Per-band Gram-Schmidt gains `cov(Ĥ_b, I) / var(I)`.
pub fn gs_gains<T: Scalar>(up: &Raster<T>, i: &Raster<T>) -> Vec<T> {
    let n: T = count(i.plane_len());
    let mi = i.mean();
    let var = i.samples().iter().map(|&v| (v - mi) * (v - mi)).sum::<T>() / n;
    if var <= lit(GS_MIN_VARIANCE) {
        return vec![T::one(); up.bands()];
    }
    up.planes()
        .map(|plane| {
            let mb = plane.iter().copied().sum::<T>() / n;
            let cov = plane.iter().zip(i.samples()).map(|(&a, &b)| (a - mb) * (b - mi)).sum::<T>() / n;
            cov / var
        })
        .collect()
}

/// Gram-Schmidt mode 1: `Ĥ_b + g_b·(P − I)`.
pub fn fuse_gs<T: Scalar>(lr: &Raster<T>, pan: &Raster<T>, w: &BandWeights<T>) -> Result<Raster<T>> {
    let p = prepare(lr, pan, w)?;
    let gains = gs_gains(&p.up, &p.i);
    let detail: Vec<T> = pan.samples().iter().zip(p.i.samples()).map(|(&a, &b)| a - b).collect();
    let n = p.up.plane_len();
    let data = p
        .up
        .samples()
        .iter()
        .enumerate()
        .map(|(k, &v)| v + gains[k / n] * detail[k % n])
        .collect();
    Ok(Raster::from_parts(p.up.width(), p.up.height(), p.up.bands(), data))
}

/// Box mean of width `2r + 1` with reflect boundary.
pub fn box_filter<T: Scalar>(plane: &[T], w: usize, h: usize, r: usize) -> Vec<T> {
    let width = 2 * r + 1;
    let inv = T::one() / count(width);
    let ri = r as isize;
    let mut rows = vec![T::zero(); w * h];
    for y in 0..h {
        let src = &plane[y * w..(y + 1) * w];
        for x in 0..w {
            let s: T = (-ri..=ri).map(|d| src[reflect(x as isize + d, w)]).sum();
            rows[y * w + x] = s * inv;
        }
    }
    let mut out = vec![T::zero(); w * h];
    for y in 0..h {
        for d in -ri..=ri {
            let sy = reflect(y as isize + d, h);
            for x in 0..w {
                out[y * w + x] += rows[sy * w + x];
            }
        }
        for v in &mut out[y * w..(y + 1) * w] {
            *v *= inv;
        }
    }
    out
}

/// `Ĥ_b · P / box(P)` with box width `2s + 1`.
pub fn fuse_sfim<T: Scalar>(lr: &Raster<T>, pan: &Raster<T>, w: &BandWeights<T>) -> Result<Raster<T>> {
    let p = prepare(lr, pan, w)?;
    let smooth = box_filter(pan.samples(), pan.width(), pan.height(), p.ratio);
    Ok(modulate(&p.up, pan.samples(), &smooth))
}
