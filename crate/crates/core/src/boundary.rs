//! Half-sample symmetric ("reflect") boundary extension.
//!
//! Index `-1` maps to `0`, `n` maps to `n - 1`; the extension is periodic with
//! period `2n`, so arbitrarily large overhangs are valid.

#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// Copies `src` into a new buffer padded by `pad` reflected samples on each side.
pub(crate) fn pad_reflect<T: Copy>(src: &[T], pad: usize, out: &mut Vec<T>) {
    out.clear();
    let n = src.len();
    out.extend((0..n + 2 * pad).map(|i| src[reflect(i as isize - pad as isize, n)]));
}
