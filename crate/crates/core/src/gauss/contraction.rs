//! Frequency-domain certificate for the reverse-filtering map.
//!
//! For a linear filter with transfer function `ĝ(ω)`, the map
//! `φ(x) = x + y - f(x)` has Lipschitz constant `max_ω |1 - ĝ(ω)|`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{param_err, Result};
use crate::gauss::bank::MultiScaleFilter;
use crate::scalar::{to_f64, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    /// `max_ω |1 - ĝ(ω)|` over the DFT grid.
    pub c: f64,
    pub grid: (usize, usize),
    /// DFT bin `(u, v)` attaining `c`.
    pub argmax: (usize, usize),
    /// Smallest real part of `ĝ` on the grid; negative lobes push `c` above 1.
    pub min_response: f64,
}

impl ContractionReport {
    pub fn is_contraction(&self) -> bool {
        self.c < 1.0
    }
}

/// Transfer function of the effective mixture kernel on a `grid_w × grid_h` DFT grid,
/// row-major over `(v, u)`.
pub fn transfer_function<T: Scalar>(
    f: &MultiScaleFilter<T>,
    grid_w: usize,
    grid_h: usize,
) -> Result<Vec<Complex<f64>>> {
    let m = f.max_size();
    if grid_w < m || grid_h < m {
        return Err(param_err!("grid {grid_w}x{grid_h} is smaller than the {m}x{m} kernel"));
    }
    let r = (m / 2) as isize;
    let weights = f.effective_weights();
    let mut buf = vec![Complex::new(0.0, 0.0); grid_w * grid_h];
    // centre the kernel on the origin of the periodic grid
    for i in 0..m {
        for j in 0..m {
            let y = (i as isize - r).rem_euclid(grid_h as isize) as usize;
            let x = (j as isize - r).rem_euclid(grid_w as isize) as usize;
            buf[y * grid_w + x].re += to_f64(weights[i * m + j]);
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft_forward(grid_w);
    for row in buf.chunks_exact_mut(grid_w) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_forward(grid_h);
    let mut col = vec![Complex::new(0.0, 0.0); grid_h];
    for x in 0..grid_w {
        for (y, c) in col.iter_mut().enumerate() {
            *c = buf[y * grid_w + x];
        }
        col_fft.process(&mut col);
        for (y, c) in col.iter().enumerate() {
            buf[y * grid_w + x] = *c;
        }
    }
    Ok(buf)
}

/// `contraction_constant(f, grid_w, grid_h)`.
pub fn contraction_constant<T: Scalar>(
    f: &MultiScaleFilter<T>,
    grid_w: usize,
    grid_h: usize,
) -> Result<ContractionReport> {
    let spectrum = transfer_function(f, grid_w, grid_h)?;
    let mut c = 0.0f64;
    let mut argmax = (0, 0);
    let mut min_response = f64::INFINITY;
    for (idx, g) in spectrum.iter().enumerate() {
        let dev = (Complex::new(1.0, 0.0) - g).norm();
        if dev > c {
            c = dev;
            argmax = (idx % grid_w, idx / grid_w);
        }
        min_response = min_response.min(g.re);
    }
    Ok(ContractionReport { c, grid: (grid_w, grid_h), argmax, min_response })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{GaussianKernel, SigmaRule};

    /// Direct DTFT of a symmetric kernel evaluated at the grid's bins.
    fn brute_c(f: &MultiScaleFilter<f64>, gw: usize, gh: usize) -> f64 {
        let m = f.max_size();
        let r = (m / 2) as f64;
        let w = f.effective_weights();
        let mut c = 0.0f64;
        for v in 0..gh {
            for u in 0..gw {
                let (wu, wv) = (
                    2.0 * std::f64::consts::PI * u as f64 / gw as f64,
                    2.0 * std::f64::consts::PI * v as f64 / gh as f64,
                );
                let mut re = 0.0;
                let mut im = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        let phase = wv * (i as f64 - r) + wu * (j as f64 - r);
                        re += w[i * m + j] * phase.cos();
                        im -= w[i * m + j] * phase.sin();
                    }
                }
                c = c.max(((1.0 - re).powi(2) + im * im).sqrt());
            }
        }
        c
    }

    #[test]
    fn dirac_has_zero_constant() {
        let rep = contraction_constant(&MultiScaleFilter::<f64>::dirac(), 8, 8).unwrap();
        assert!(rep.c < 1e-15);
        assert!((rep.min_response - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_smaller_than_kernel_rejected() {
        let f = MultiScaleFilter::<f64>::uniform(17, SigmaRule::Quarter).unwrap();
        assert!(contraction_constant(&f, 16, 64).is_err());
    }

    #[test]
    fn fft_matches_direct_dtft() {
        for m in [3, 7, 11] {
            let f = MultiScaleFilter::<f64>::uniform(m, SigmaRule::Quarter).unwrap();
            let rep = contraction_constant(&f, 20, 16).unwrap();
            assert!((rep.c - brute_c(&f, 20, 16)).abs() < 1e-12, "M={m}");
        }
    }

    #[test]
    fn default_bank_is_a_contraction() {
        let f = MultiScaleFilter::<f64>::uniform(17, SigmaRule::Quarter).unwrap();
        let rep = contraction_constant(&f, 128, 128).unwrap();
        assert!(rep.is_contraction(), "c = {}", rep.c);
        assert!(rep.min_response > 0.0);
    }

    #[test]
    fn more_dirac_weight_shrinks_constant() {
        let base = MultiScaleFilter::<f64>::uniform(17, SigmaRule::Quarter).unwrap();
        let mut last = f64::INFINITY;
        for share in [0.0, 1.0 / 9.0, 0.3, 0.6, 0.9] {
            let rest = (1.0 - share) / 8.0;
            let mut g = vec![rest; 9];
            g[0] = share;
            let rep = contraction_constant(&base.with_gammas(g).unwrap(), 128, 128).unwrap();
            assert!(rep.c < last, "share {share}: {} !< {last}", rep.c);
            last = rep.c;
        }
    }

    fn single_scale(size: usize, sigma: f64) -> MultiScaleFilter<f64> {
        let mut ks: Vec<GaussianKernel<f64>> =
            (1..size).step_by(2).map(|s| GaussianKernel::new(s, 0.0).unwrap()).collect();
        ks.push(GaussianKernel::new(size, sigma).unwrap());
        let mut g = vec![0.0; ks.len()];
        *g.last_mut().unwrap() = 1.0;
        MultiScaleFilter::new(ks, g).unwrap()
    }

    #[test]
    fn contraction_iff_positive_spectrum() {
        // real, even kernels with ĝ <= 1: |1 - ĝ| < 1 exactly when ĝ > 0
        for size in (3..=17).step_by(2) {
            for d in [2.0, 4.0, 6.0, 8.0] {
                let rep = contraction_constant(&single_scale(size, size as f64 / d), 64, 64).unwrap();
                assert_eq!(rep.is_contraction(), rep.min_response > 0.0, "size {size}, d {d}");
            }
        }
        assert!(contraction_constant(&single_scale(3, 0.75), 64, 64).unwrap().is_contraction());
        assert!(contraction_constant(&single_scale(5, 1.0), 64, 64).unwrap().is_contraction());
    }

    #[test]
    fn quarter_rule_kernels_have_negative_lobes() {
        // σ = size/4 truncates near 2σ; from 5x5 up the spectrum dips below zero
        let f = MultiScaleFilter::<f64>::uniform(17, SigmaRule::Quarter).unwrap();
        let mut g = vec![0.0; 9];
        g[8] = 1.0;
        let rep = contraction_constant(&f.with_gammas(g).unwrap(), 64, 64).unwrap();
        assert!(rep.min_response < 0.0);
        assert!(rep.c > 1.0 && rep.c < 1.03, "c = {}", rep.c);
    }
}
