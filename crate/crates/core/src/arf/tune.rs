//! Derivative-free tuning of the mixing weights of both filter banks.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{arf_fuse, IterationConfig};
use crate::error::{param_err, Result};
use crate::gauss::MultiScaleFilter;
use crate::metrics::loss_values;
use crate::raster::{intensity, BandWeights, Raster};
use crate::scalar::{lit, to_f64, Scalar};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Debug, PartialEq)]
pub struct TuneConfig {
    /// Maximum number of fusion runs, including the initial one.
    pub budget: usize,
    pub seed: u64,
    /// Weight of the intensity SSIM term in the objective.
    pub lambda: f64,
    /// Objective evaluations spent on each coordinate line.
    pub line_evaluations: usize,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self { budget: 200, seed: 0, lambda: 0.1, line_evaluations: 5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneResult<T> {
    pub f_bank: MultiScaleFilter<T>,
    pub g_bank: MultiScaleFilter<T>,
    /// Objective at the starting weights.
    pub initial_loss: f64,
    pub best_loss: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Branch {
    Ms,
    Pan,
}

struct Search<'a, T: Scalar> {
    lr: &'a Raster<T>,
    pan: &'a Raster<T>,
    gt: &'a Raster<T>,
    gt_i: Raster<T>,
    weights: &'a BandWeights<T>,
    cfg: IterationConfig,
    lambda: T,
    budget: usize,
    used: usize,
}

impl<T: Scalar> Search<'_, T> {
    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    fn loss(&mut self, f: &MultiScaleFilter<T>, g: &MultiScaleFilter<T>) -> Result<f64> {
        self.used += 1;
        let out = arf_fuse(self.lr, self.pan, f, g, self.weights, &self.cfg)?;
        let l = loss_values(&out.fused, &out.intensity_estimate, self.gt, &self.gt_i, self.lambda)?;
        Ok(to_f64(l.l_sum))
    }
}

/// `(1 − t)·γ + t·e_i`, clipped at zero and renormalized.
fn move_along<T: Scalar>(gammas: &[T], i: usize, t: f64) -> Vec<T> {
    let t: T = lit(t);
    let mut out: Vec<T> = gammas
        .iter()
        .enumerate()
        .map(|(j, &g)| {
            let e = if i == j { T::one() } else { T::zero() };
            ((T::one() - t) * g + t * e).max(T::zero())
        })
        .collect();
    let s: T = out.iter().copied().sum();
    for v in &mut out {
        *v /= s;
    }
    out
}

/// Cyclic coordinate search with golden-section line steps over the γ
/// simplices of `f_bank` and `g_bank`, minimizing
/// `RMS(H^K − GT) + λ·(1 − SSIM(H̃_I^K, GT_I))`.
///
/// Only improvements are accepted, so the returned loss never exceeds the
/// initial one. The coordinate order of each cycle is drawn from `seed`.
#[allow(clippy::too_many_arguments)]
pub fn tune_gammas<T: Scalar>(
    lr: &Raster<T>,
    pan: &Raster<T>,
    gt: &Raster<T>,
    f_bank: &MultiScaleFilter<T>,
    g_bank: &MultiScaleFilter<T>,
    weights: &BandWeights<T>,
    cfg: &IterationConfig,
    tune: &TuneConfig,
) -> Result<TuneResult<T>> {
    if tune.budget == 0 {
        return Err(param_err!("tuning budget must be >= 1"));
    }
    if tune.line_evaluations == 0 {
        return Err(param_err!("line search needs at least one evaluation"));
    }
    if !(tune.lambda >= 0.0) {
        return Err(param_err!("loss weight must be >= 0, got {}", tune.lambda));
    }
    let mut search = Search {
        lr,
        pan,
        gt,
        gt_i: intensity(gt, weights)?,
        weights,
        cfg: IterationConfig { record_trace: false, ..cfg.clone() },
        lambda: lit(tune.lambda),
        budget: tune.budget,
        used: 0,
    };
    let mut best_f = f_bank.clone();
    let mut best_g = g_bank.clone();
    let initial_loss = search.loss(&best_f, &best_g)?;
    let mut best_loss = initial_loss;

    let mut coords: Vec<(Branch, usize)> = (0..f_bank.kernels().len())
        .map(|i| (Branch::Ms, i))
        .chain((0..g_bank.kernels().len()).map(|i| (Branch::Pan, i)))
        .collect();
    if f_bank.kernels().len() < 2 {
        coords.retain(|c| c.0 != Branch::Ms);
    }
    if g_bank.kernels().len() < 2 {
        coords.retain(|c| c.0 != Branch::Pan);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(tune.seed);
    let mut span = 1.0;

    while !coords.is_empty() && !search.exhausted() && span > 1e-6 {
        coords.shuffle(&mut rng);
        let cycle_start = best_loss;
        for &(branch, i) in &coords {
            if search.exhausted() {
                break;
            }
            let base = match branch {
                Branch::Ms => best_f.gammas().to_vec(),
                Branch::Pan => best_g.gammas().to_vec(),
            };
            let gi = to_f64(base[i]);
            let lo = if gi >= 1.0 { 0.0 } else { -gi / (1.0 - gi) * span };
            let hi = span;
            let mut eval = |t: f64, search: &mut Search<'_, T>| -> Result<f64> {
                let gammas = move_along(&base, i, t);
                let (f, g) = match branch {
                    Branch::Ms => (best_f.with_gammas(gammas)?, best_g.clone()),
                    Branch::Pan => (best_f.clone(), best_g.with_gammas(gammas)?),
                };
                let l = search.loss(&f, &g)?;
                if l < best_loss {
                    best_loss = l;
                    best_f = f;
                    best_g = g;
                }
                Ok(l)
            };

            let (mut a, mut b) = (lo, hi);
            let mut c = b - INV_PHI * (b - a);
            let mut d = a + INV_PHI * (b - a);
            let mut fc = None;
            let mut fd = None;
            for _ in 0..tune.line_evaluations {
                if search.exhausted() {
                    break;
                }
                if fc.is_none() {
                    fc = Some(eval(c, &mut search)?);
                    continue;
                }
                if fd.is_none() {
                    fd = Some(eval(d, &mut search)?);
                    continue;
                }
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - INV_PHI * (b - a);
                    fc = Some(eval(c, &mut search)?);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + INV_PHI * (b - a);
                    fd = Some(eval(d, &mut search)?);
                }
            }
        }
        if best_loss >= cycle_start {
            span *= 0.5;
        }
    }

    Ok(TuneResult { f_bank: best_f, g_bank: best_g, initial_loss, best_loss, evaluations: search.used })
}
