use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{param_err, Error, Result};
use crate::gauss::kernel::{convolve_plane, GaussianKernel};
use crate::raster::Raster;
use crate::scalar::{count, lit, Scalar};

/// How the Gaussian width of each scale is derived from its size.
#[derive(Clone, Copy, Debug, PartialEq)]
#[derive(Default)]
pub enum SigmaRule {
    /// `σ = size / 4`.
    #[default]
    Quarter,
    /// `σ = size / d`.
    Divisor(f64),
}

impl SigmaRule {
    pub fn sigma(&self, size: usize) -> f64 {
        if size == 1 {
            return 0.0;
        }
        match self {
            SigmaRule::Quarter => size as f64 / 4.0,
            SigmaRule::Divisor(d) => size as f64 / d,
        }
    }
}


impl FromStr for SigmaRule {
    type Err = Error;

    /// Accepts `quarter` or `size/<d>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "quarter" {
            return Ok(SigmaRule::Quarter);
        }
        if let Some(d) = s.strip_prefix("size/") {
            let d: f64 = d.parse().map_err(|_| param_err!("invalid sigma divisor `{d}`"))?;
            if !(d > 0.0) || !d.is_finite() {
                return Err(param_err!("sigma divisor must be positive, got {d}"));
            }
            return Ok(SigmaRule::Divisor(d));
        }
        Err(param_err!("unknown sigma rule `{s}` (expected `quarter` or `size/<d>`)"))
    }
}

impl fmt::Display for SigmaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaRule::Quarter => f.write_str("quarter"),
            SigmaRule::Divisor(d) => write!(f, "size/{d}"),
        }
    }
}

/// Bank of Gaussian kernels of sizes `1, 3, …, M` mixed by simplex weights γ.
///
/// Acts as the linear filter `y = Σ_k γ_k (g(σ_k) ∗ x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiScaleFilter<T> {
    kernels: Vec<GaussianKernel<T>>,
    gammas: Vec<T>,
}

pub(crate) fn check_simplex<T: Scalar>(gammas: &[T]) -> Result<()> {
    if gammas.is_empty() {
        return Err(param_err!("mixing coefficients must not be empty"));
    }
    for (i, g) in gammas.iter().enumerate() {
        if !g.is_finite() || *g < T::zero() {
            return Err(param_err!("mixing coefficient {i} = {g} must be finite and non-negative"));
        }
    }
    let sum: T = gammas.iter().copied().sum();
    if (sum - T::one()).abs() > T::simplex_tolerance() {
        return Err(param_err!("mixing coefficients sum to {sum}, expected 1"));
    }
    Ok(())
}

impl<T: Scalar> MultiScaleFilter<T> {
    pub fn new(kernels: Vec<GaussianKernel<T>>, gammas: Vec<T>) -> Result<Self> {
        if kernels.len() != gammas.len() {
            return Err(param_err!("{} kernels but {} mixing coefficients", kernels.len(), gammas.len()));
        }
        for (i, k) in kernels.iter().enumerate() {
            if k.size() != 2 * i + 1 {
                return Err(param_err!("scale {i} must have size {}, got {}", 2 * i + 1, k.size()));
            }
        }
        check_simplex(&gammas)?;
        Ok(Self { kernels, gammas })
    }

    /// Sizes `1..=max_size` (odd), widths from `rule`, uniform γ.
    pub fn uniform(max_size: usize, rule: SigmaRule) -> Result<Self> {
        if max_size == 0 || max_size.is_multiple_of(2) {
            return Err(param_err!("maximum kernel size must be odd and >= 1, got {max_size}"));
        }
        let kernels = (1..=max_size)
            .step_by(2)
            .map(|s| GaussianKernel::new(s, lit(rule.sigma(s))))
            .collect::<Result<Vec<_>>>()?;
        let n = kernels.len();
        Self::new(kernels, vec![T::one() / count(n); n])
    }

    /// The identity filter.
    pub fn dirac() -> Self {
        Self { kernels: vec![GaussianKernel::dirac()], gammas: vec![T::one()] }
    }

    /// Same kernels with new mixing coefficients.
    pub fn with_gammas(&self, gammas: Vec<T>) -> Result<Self> {
        Self::new(self.kernels.clone(), gammas)
    }

    pub fn kernels(&self) -> &[GaussianKernel<T>] {
        &self.kernels
    }

    pub fn gammas(&self) -> &[T] {
        &self.gammas
    }

    pub fn max_size(&self) -> usize {
        self.kernels.last().map_or(1, |k| k.size())
    }

    pub fn scales(&self) -> usize {
        self.kernels.len()
    }

    pub(crate) fn apply_plane(&self, plane: &[T], width: usize, height: usize) -> Vec<T> {
        let mut acc = vec![T::zero(); plane.len()];
        for (k, &g) in self.kernels.iter().zip(&self.gammas) {
            if g == T::zero() {
                continue;
            }
            let y = convolve_plane(plane, width, height, k.taps());
            for (a, v) in acc.iter_mut().zip(y) {
                *a += g * v;
            }
        }
        acc
    }

    /// The effective mixture kernel as a row-major `M × M` grid.
    pub fn effective_weights(&self) -> Vec<T> {
        let m = self.max_size();
        let mut out = vec![T::zero(); m * m];
        for (k, &g) in self.kernels.iter().zip(&self.gammas) {
            let off = (m - k.size()) / 2;
            let w = k.weights();
            for i in 0..k.size() {
                for j in 0..k.size() {
                    out[(i + off) * m + j + off] += g * w[i * k.size() + j];
                }
            }
        }
        out
    }
}

/// `apply_multiscale(r, f)`; bands are filtered independently.
pub fn apply_multiscale<T: Scalar>(r: &Raster<T>, f: &MultiScaleFilter<T>) -> Raster<T> {
    if f.scales() == 1 && f.gammas[0] == T::one() && f.kernels[0].is_dirac() {
        return r.clone();
    }
    let planes: Vec<Vec<T>> = r
        .planes()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|p| f.apply_plane(p, r.width(), r.height()))
        .collect();
    Raster::from_parts(r.width(), r.height(), r.bands(), planes.concat())
}

/// Parsed filter bank configuration (`key=value` lines).
///
/// Recognized keys: `M`, `sigma_rule` (`quarter` or `size/<d>`),
/// `sigma_<size>` and `gamma_<size>`. Blank lines and `#` comments are ignored.
/// Without any `gamma_` line the mixture is uniform; otherwise unspecified
/// sizes get γ = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct BankConfig {
    pub max_size: usize,
    pub sigma_rule: SigmaRule,
    pub sigmas: BTreeMap<usize, f64>,
    pub gammas: BTreeMap<usize, f64>,
}

impl Default for BankConfig {
    fn default() -> Self {
        Self { max_size: 17, sigma_rule: SigmaRule::Quarter, sigmas: BTreeMap::new(), gammas: BTreeMap::new() }
    }
}

fn size_key(key: &str, prefix: &str) -> Option<Result<usize>> {
    key.strip_prefix(prefix).map(|s| {
        s.parse::<usize>()
            .map_err(|_| param_err!("invalid kernel size in key `{key}`"))
    })
}

impl BankConfig {
    pub fn with_max_size(max_size: usize) -> Self {
        Self { max_size, ..Self::default() }
    }

    /// Default for the intensity branch: the Dirac bank, since a PAN that is
    /// already a full-resolution intensity needs no deblurring.
    pub fn pan_default() -> Self {
        Self::with_max_size(1)
    }

    /// Parses `text`, starting from `base` for keys that are absent.
    pub fn parse_onto(text: &str, base: BankConfig) -> Result<Self> {
        let mut cfg = base;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| param_err!("line {}: expected key=value, got `{line}`", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let real = || -> Result<f64> {
                value
                    .parse::<f64>()
                    .map_err(|_| param_err!("line {}: invalid number `{value}`", lineno + 1))
            };
            if key == "M" {
                cfg.max_size = value
                    .parse()
                    .map_err(|_| param_err!("line {}: invalid M `{value}`", lineno + 1))?;
            } else if key == "sigma_rule" {
                cfg.sigma_rule = value.parse()?;
            } else if let Some(size) = size_key(key, "sigma_") {
                cfg.sigmas.insert(size?, real()?);
            } else if let Some(size) = size_key(key, "gamma_") {
                cfg.gammas.insert(size?, real()?);
            } else {
                return Err(param_err!("line {}: unknown key `{key}`", lineno + 1));
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_onto(text, Self::default())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("M={}\nsigma_rule={}\n", self.max_size, self.sigma_rule);
        for (k, v) in &self.sigmas {
            s.push_str(&format!("sigma_{k}={v}\n"));
        }
        for (k, v) in &self.gammas {
            s.push_str(&format!("gamma_{k}={v}\n"));
        }
        s
    }

    /// Validates the configuration and builds the filter.
    pub fn build<T: Scalar>(&self) -> Result<MultiScaleFilter<T>> {
        let m = self.max_size;
        if m == 0 || m.is_multiple_of(2) {
            return Err(param_err!("M must be odd and >= 1, got {m}"));
        }
        for &size in self.sigmas.keys().chain(self.gammas.keys()) {
            if size % 2 == 0 || size > m {
                return Err(param_err!("kernel size {size} is not an odd size in 1..={m}"));
            }
        }
        let kernels = (1..=m)
            .step_by(2)
            .map(|s| {
                let sigma = self.sigmas.get(&s).copied().unwrap_or_else(|| self.sigma_rule.sigma(s));
                GaussianKernel::new(s, lit(sigma))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = kernels.len();
        let gammas = if self.gammas.is_empty() {
            vec![T::one() / count(n); n]
        } else {
            (1..=m)
                .step_by(2)
                .map(|s| lit(self.gammas.get(&s).copied().unwrap_or(0.0)))
                .collect()
        };
        MultiScaleFilter::new(kernels, gammas)
    }

    /// Captures the mixing coefficients of `f` into this configuration.
    pub fn set_gammas<T: Scalar>(&mut self, f: &MultiScaleFilter<T>) {
        self.gammas = f
            .kernels()
            .iter()
            .zip(f.gammas())
            .map(|(k, g)| (k.size(), g.to_f64().unwrap_or(0.0)))
            .collect();
    }
}
