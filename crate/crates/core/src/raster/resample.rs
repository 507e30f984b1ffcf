use crate::boundary::reflect;
use crate::error::{dim_err, param_err, Result};
use crate::raster::Raster;
use crate::scalar::{count, lit, Scalar};

/// Catmull-Rom cubic convolution weights (`a = -0.5`) for fractional offset `t ∈ [0, 1)`,
/// applied to samples at offsets `-1, 0, 1, 2`.
fn catmull_rom<T: Scalar>(t: T) -> [T; 4] {
    let a: T = lit(-0.5);
    let one = T::one();
    let two: T = lit(2.0);
    let three: T = lit(3.0);
    let near = |d: T| ((a + two) * d - (a + three)) * d * d + one;
    let far = |d: T| ((a * d - lit::<T>(5.0) * a) * d + lit::<T>(8.0) * a) * d - lit::<T>(4.0) * a;
    [far(one + t), near(t), near(one - t), far(two - t)]
}

/// Interpolates one line of `n` samples to `n * factor` samples.
///
/// Output sample `X` sits at input coordinate `X / factor`, so every
/// `factor`-th output sample reproduces an input sample exactly.
fn upsample_line<T: Scalar>(src: &[T], factor: usize, taps: &[[T; 4]], out: &mut [T]) {
    let n = src.len();
    for (i, o) in out.iter_mut().enumerate() {
        let base = (i / factor) as isize;
        let phase = i % factor;
        if phase == 0 {
            *o = src[base as usize];
            continue;
        }
        let w = &taps[phase];
        let mut acc = T::zero();
        for (k, &wk) in w.iter().enumerate() {
            acc += wk * src[reflect(base + k as isize - 1, n)];
        }
        *o = acc;
    }
}

/// Bicubic (Catmull-Rom) upsampling by an integer factor with reflect boundary.
pub fn upsample<T: Scalar>(r: &Raster<T>, factor: usize) -> Result<Raster<T>> {
    if factor == 0 {
        return Err(param_err!("upsample factor must be >= 1"));
    }
    if factor == 1 {
        return Ok(r.clone());
    }
    let (w, h) = (r.width(), r.height());
    let (ow, oh) = (w * factor, h * factor);
    let taps: Vec<[T; 4]> = (0..factor)
        .map(|p| catmull_rom(count::<T>(p) / count::<T>(factor)))
        .collect();

    let mut data = Vec::with_capacity(ow * oh * r.bands());
    let mut wide = vec![T::zero(); ow * h];
    let mut col = vec![T::zero(); h];
    let mut col_out = vec![T::zero(); oh];
    for plane in r.planes() {
        for y in 0..h {
            upsample_line(&plane[y * w..(y + 1) * w], factor, &taps, &mut wide[y * ow..(y + 1) * ow]);
        }
        let start = data.len();
        data.resize(start + ow * oh, T::zero());
        let dst = &mut data[start..];
        for x in 0..ow {
            for (y, c) in col.iter_mut().enumerate() {
                *c = wide[y * ow + x];
            }
            upsample_line(&col, factor, &taps, &mut col_out);
            for (y, &v) in col_out.iter().enumerate() {
                dst[y * ow + x] = v;
            }
        }
    }
    Ok(Raster::from_parts(ow, oh, r.bands(), data))
}

/// Phase-0 decimation: `out[x, y] = in[factor·x, factor·y]`. No anti-alias filtering.
pub fn downsample<T: Scalar>(r: &Raster<T>, factor: usize) -> Result<Raster<T>> {
    if factor == 0 {
        return Err(param_err!("downsample factor must be >= 1"));
    }
    if !r.width().is_multiple_of(factor) || !r.height().is_multiple_of(factor) {
        return Err(dim_err!(
            "{}x{} raster is not divisible by factor {factor}",
            r.width(),
            r.height()
        ));
    }
    if factor == 1 {
        return Ok(r.clone());
    }
    let (ow, oh) = (r.width() / factor, r.height() / factor);
    let mut data = Vec::with_capacity(ow * oh * r.bands());
    for plane in r.planes() {
        for y in 0..oh {
            let row = &plane[y * factor * r.width()..];
            data.extend((0..ow).map(|x| row[x * factor]));
        }
    }
    Ok(Raster::from_parts(ow, oh, r.bands(), data))
}
