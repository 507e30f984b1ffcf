//! Full-reference quality metrics on the normalized `[0, 1]` domain.

use crate::boundary::reflect;
use crate::error::{dim_err, Error, Result};
use crate::gauss::GaussianKernel;
use crate::raster::Raster;
use crate::scalar::{count, lit, Scalar};

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
pub const Q_WINDOW: usize = 8;
/// PSNR above this is printed as this value.
pub const PSNR_CAP_DB: f64 = 99.0;

fn same_shape<T: Scalar>(x: &Raster<T>, r: &Raster<T>, what: &str) -> Result<()> {
    x.ensure_same_shape(r, what)
}

fn min_size<T: Scalar>(x: &Raster<T>, n: usize, what: &str) -> Result<()> {
    if x.width() < n || x.height() < n {
        Err(dim_err!("{what} needs at least {n}x{n} pixels, got {}x{}", x.width(), x.height()))
    } else {
        Ok(())
    }
}

/// `10·log10(1 / MSE)`; identical inputs give `+∞`.
pub fn psnr<T: Scalar>(x: &Raster<T>, reference: &Raster<T>) -> Result<T> {
    same_shape(x, reference, "psnr")?;
    let mse = x.rms_diff(reference)?.powi(2);
    if mse == T::zero() {
        return Ok(T::infinity());
    }
    Ok(lit::<T>(10.0) * (T::one() / mse).log10())
}

/// Valid-region separable filtering of one plane (output shrinks by `taps.len() - 1`).
fn filter_valid<T: Scalar>(plane: &[T], w: usize, h: usize, taps: &[T]) -> (Vec<T>, usize, usize) {
    let n = taps.len();
    let (ow, oh) = (w + 1 - n, h + 1 - n);
    let mut rows = vec![T::zero(); ow * h];
    for y in 0..h {
        let src = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = taps.iter().zip(&src[x..x + n]).map(|(&t, &v)| t * v).sum();
        }
    }
    let mut out = vec![T::zero(); ow * oh];
    for y in 0..oh {
        for (k, &t) in taps.iter().enumerate() {
            let src = &rows[(y + k) * ow..(y + k + 1) * ow];
            for (o, &v) in out[y * ow..(y + 1) * ow].iter_mut().zip(src) {
                *o += t * v;
            }
        }
    }
    (out, ow, oh)
}

fn ssim_plane<T: Scalar>(a: &[T], b: &[T], w: usize, h: usize, taps: &[T]) -> T {
    let c1: T = lit(SSIM_K1 * SSIM_K1);
    let c2: T = lit(SSIM_K2 * SSIM_K2);
    let two: T = lit(2.0);
    let sq = |s: &[T]| s.iter().map(|&v| v * v).collect::<Vec<T>>();
    let ab: Vec<T> = a.iter().zip(b).map(|(&p, &q)| p * q).collect();
    let (mu_a, ow, oh) = filter_valid(a, w, h, taps);
    let (mu_b, _, _) = filter_valid(b, w, h, taps);
    let (e_aa, _, _) = filter_valid(&sq(a), w, h, taps);
    let (e_bb, _, _) = filter_valid(&sq(b), w, h, taps);
    let (e_ab, _, _) = filter_valid(&ab, w, h, taps);
    let mut total = T::zero();
    for i in 0..ow * oh {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = e_aa[i] - ma * ma;
        let vb = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        total += ((two * ma * mb + c1) * (two * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    total / count(ow * oh)
}

/// Mean SSIM over 11×11 Gaussian (σ = 1.5) windows, averaged over bands.
pub fn ssim<T: Scalar>(x: &Raster<T>, reference: &Raster<T>) -> Result<T> {
    same_shape(x, reference, "ssim")?;
    min_size(x, SSIM_WINDOW, "ssim")?;
    let kernel = GaussianKernel::new(SSIM_WINDOW, lit(SSIM_SIGMA))?;
    let total: T = x
        .planes()
        .zip(reference.planes())
        .map(|(a, b)| ssim_plane(a, b, x.width(), x.height(), kernel.taps()))
        .sum();
    Ok(total / count(x.bands()))
}

/// Mean per-pixel spectral angle in radians; zero-norm pixels contribute 0.
pub fn sam<T: Scalar>(x: &Raster<T>, reference: &Raster<T>) -> Result<T> {
    same_shape(x, reference, "sam")?;
    if x.bands() < 2 {
        return Err(dim_err!("sam needs at least 2 bands, got {}", x.bands()));
    }
    let n = x.plane_len();
    let two: T = lit(2.0);
    let mut total = T::zero();
    for p in 0..n {
        let nx = (0..x.bands()).map(|b| x.samples()[b * n + p].powi(2)).sum::<T>().sqrt();
        let nr = (0..x.bands()).map(|b| reference.samples()[b * n + p].powi(2)).sum::<T>().sqrt();
        if nx == T::zero() || nr == T::zero() {
            continue;
        }
        // 2·atan2(|u − v|, |u + v|) on unit vectors stays accurate near 0 and π
        let (mut diff, mut sum) = (T::zero(), T::zero());
        for b in 0..x.bands() {
            let (u, v) = (x.samples()[b * n + p] / nx, reference.samples()[b * n + p] / nr);
            diff += (u - v) * (u - v);
            sum += (u + v) * (u + v);
        }
        total += two * diff.sqrt().atan2(sum.sqrt());
    }
    Ok(total / count(n))
}

/// `100/ratio · sqrt(mean_b (RMSE_b / μ_b)²)` with `μ_b` the reference band mean.
pub fn ergas<T: Scalar>(x: &Raster<T>, reference: &Raster<T>, ratio: usize) -> Result<T> {
    same_shape(x, reference, "ergas")?;
    if ratio == 0 {
        return Err(Error::Parameter("ergas ratio must be >= 1".into()));
    }
    let n: T = count(x.plane_len());
    let mut acc = T::zero();
    for (b, (p, q)) in x.planes().zip(reference.planes()).enumerate() {
        let mu = q.iter().copied().sum::<T>() / n;
        if mu.abs() <= lit(1e-12) {
            return Err(Error::Numeric(format!("ergas: reference band {b} has zero mean")));
        }
        let mse = p.iter().zip(q).map(|(&u, &v)| (u - v) * (u - v)).sum::<T>() / n;
        acc += mse / (mu * mu);
    }
    Ok(lit::<T>(100.0) / count(ratio) * (acc / count(x.bands())).sqrt())
}

/// 8-neighbour 3×3 Laplacian with reflect boundary.
pub(crate) fn laplacian<T: Scalar>(plane: &[T], w: usize, h: usize) -> Vec<T> {
    let eight: T = lit(8.0);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut ring = T::zero();
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let sx = reflect(x as isize + dx, w);
                    let sy = reflect(y as isize + dy, h);
                    ring += plane[sy * w + sx];
                }
            }
            out.push(eight * plane[y * w + x] - ring);
        }
    }
    out
}

/// Pearson correlation; `None` when either input has zero variance.
pub(crate) fn pearson<T: Scalar>(a: &[T], b: &[T]) -> Option<T> {
    let n: T = count(a.len());
    let ma = a.iter().copied().sum::<T>() / n;
    let mb = b.iter().copied().sum::<T>() / n;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&u, &v) in a.iter().zip(b) {
        let (du, dv) = (u - ma, v - mb);
        sab += du * dv;
        saa += du * du;
        sbb += dv * dv;
    }
    if saa == T::zero() || sbb == T::zero() {
        None
    } else {
        Some(sab / (saa * sbb).sqrt())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SccValue<T> {
    pub value: T,
    /// Bands whose Laplacian response was constant; they contribute 0.
    pub degenerate_bands: Vec<usize>,
}

/// Spatial correlation coefficient: mean Pearson correlation of
/// Laplacian-filtered bands.
pub fn scc<T: Scalar>(x: &Raster<T>, reference: &Raster<T>) -> Result<SccValue<T>> {
    same_shape(x, reference, "scc")?;
    let (w, h) = (x.width(), x.height());
    let mut total = T::zero();
    let mut degenerate_bands = Vec::new();
    for (b, (p, q)) in x.planes().zip(reference.planes()).enumerate() {
        match pearson(&laplacian(p, w, h), &laplacian(q, w, h)) {
            Some(c) => total += c,
            None => degenerate_bands.push(b),
        }
    }
    Ok(SccValue { value: total / count(x.bands()), degenerate_bands })
}

/// Universal image quality index of one band pair over 8×8 sliding windows.
///
/// Windows with a zero denominator are skipped; if every window is
/// degenerate the index is 1 for identical bands and 0 otherwise.
pub fn uiqi_plane<T: Scalar>(a: &[T], b: &[T], w: usize, h: usize) -> T {
    let n = Q_WINDOW;
    let inv: T = T::one() / count(n * n);
    let two: T = lit(2.0);
    let mut total = T::zero();
    let mut windows = 0usize;
    for y0 in 0..=h - n {
        for x0 in 0..=w - n {
            let (mut sa, mut sb) = (T::zero(), T::zero());
            for y in y0..y0 + n {
                for x in x0..x0 + n {
                    sa += a[y * w + x];
                    sb += b[y * w + x];
                }
            }
            let (ma, mb) = (sa * inv, sb * inv);
            let (mut vaa, mut vbb, mut vab) = (T::zero(), T::zero(), T::zero());
            for y in y0..y0 + n {
                for x in x0..x0 + n {
                    let (da, db) = (a[y * w + x] - ma, b[y * w + x] - mb);
                    vaa += da * da;
                    vbb += db * db;
                    vab += da * db;
                }
            }
            let (vaa, vbb, vab) = (vaa * inv, vbb * inv, vab * inv);
            let (spread, level) = (vaa + vbb, ma * ma + mb * mb);
            if spread == T::zero() || level == T::zero() {
                continue;
            }
            // correlation·contrast and luminance factors, each exactly 1 for identical windows
            total += (two * vab / spread) * (two * ma * mb / level);
            windows += 1;
        }
    }
    if windows == 0 {
        return if a == b { T::one() } else { T::zero() };
    }
    total / count(windows)
}

/// Per-band UIQI averaged over bands.
pub fn q_index<T: Scalar>(x: &Raster<T>, reference: &Raster<T>) -> Result<T> {
    same_shape(x, reference, "q_index")?;
    min_size(x, Q_WINDOW, "q_index")?;
    let total: T = x
        .planes()
        .zip(reference.planes())
        .map(|(a, b)| uiqi_plane(a, b, x.width(), x.height()))
        .sum();
    Ok(total / count(x.bands()))
}
