//! Procedural multispectral test scenes.
//!
//! Every scene is a shared single-band structure `S(x, y) ∈ [0, 1]` with sharp
//! edges, mapped into each band as `clamp(gain_b · S + offset_b + tint_b, 0, 1)`.
//! `tint_b` is a smooth per-band field plus, for object-based kinds, a
//! per-object spectral offset. All randomness comes from a ChaCha8 stream
//! seeded with `seed` (`rand_chacha::ChaCha8Rng::seed_from_u64`), so scenes
//! are reproducible bit for bit on every platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param_err, Error, Result};
use crate::raster::Raster;
use crate::scalar::{lit, Scalar};

pub const MIN_SCENE_SIZE: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SceneKind {
    Gradient,
    Checker,
    Blobs,
    TextLike,
}

impl SceneKind {
    pub const ALL: [SceneKind; 4] = [SceneKind::Gradient, SceneKind::Checker, SceneKind::Blobs, SceneKind::TextLike];

    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Gradient => "gradient",
            SceneKind::Checker => "checker",
            SceneKind::Blobs => "blobs",
            SceneKind::TextLike => "text-like",
        }
    }
}

impl fmt::Display for SceneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SceneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SceneKind::ALL
            .into_iter()
            .find(|k| k.name() == s || (s == "text" && *k == SceneKind::TextLike))
            .ok_or_else(|| param_err!("unknown scene kind `{s}` (gradient, checker, blobs, text-like)"))
    }
}

/// Structure plane plus a per-pixel object label (0 = background).
struct Structure {
    values: Vec<f64>,
    labels: Vec<usize>,
    objects: usize,
}

fn gradient(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Structure {
    let theta = rng.random_range(0.0..std::f64::consts::PI);
    let (c, s) = (theta.cos(), theta.sin());
    let edge_pos = rng.random_range(0.35..0.65);
    let edge_angle = rng.random_range(0.0..std::f64::consts::PI);
    let (ec, es) = (edge_angle.cos(), edge_angle.sin());
    let bar = rng.random_range(0.2..0.8);
    let mut values = Vec::with_capacity(w * h);
    let mut labels = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (u, v) = (x as f64 / (w - 1) as f64, y as f64 / (h - 1) as f64);
            let ramp = 0.5 + 0.5 * ((u - 0.5) * c + (v - 0.5) * s) * std::f64::consts::SQRT_2;
            let side = (u - 0.5) * ec + (v - 0.5) * es + 0.5 > edge_pos;
            let in_bar = ((u - bar).abs() < 0.04) as usize;
            let mut val = 0.15 + 0.5 * ramp + if side { 0.2 } else { 0.0 };
            if in_bar == 1 {
                val = 0.9;
            }
            values.push(val);
            labels.push(side as usize + 2 * in_bar);
        }
    }
    Structure { values, labels, objects: 3 }
}

fn checker(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Structure {
    let cell = (w.min(h) / 8).max(4);
    let (ox, oy) = (rng.random_range(0..cell), rng.random_range(0..cell));
    let mut values = Vec::with_capacity(w * h);
    let mut labels = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let dark = ((x + ox) / cell + (y + oy) / cell) % 2 == 1;
            values.push(if dark { 0.2 } else { 0.8 });
            labels.push(dark as usize);
        }
    }
    Structure { values, labels, objects: 1 }
}

fn blobs(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Structure {
    let n = rng.random_range(12..20);
    let rmax = (w.min(h) as f64 / 6.0).max(4.0);
    let mut values = vec![0.15; w * h];
    let mut labels = vec![0; w * h];
    for id in 1..=n {
        let cx = rng.random_range(0.0..w as f64);
        let cy = rng.random_range(0.0..h as f64);
        let r = rng.random_range(3.0..rmax);
        let v = rng.random_range(0.2..0.95);
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                if dx * dx + dy * dy < r * r {
                    values[y * w + x] = v;
                    labels[y * w + x] = id;
                }
            }
        }
    }
    Structure { values, labels, objects: n }
}

fn text_like(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Structure {
    let mut values = vec![0.85; w * h];
    let mut labels = vec![0; w * h];
    let (gw, gh) = (6, 9);
    let mut id = 0;
    for row in 0..(h - 2) / (gh + 3) {
        let y0 = 2 + row * (gh + 3);
        let ink = rng.random_range(0.05..0.35);
        id += 1;
        for col in 0..(w - 2) / (gw + 1) {
            if rng.random_bool(0.15) {
                continue;
            }
            let x0 = 1 + col * (gw + 1);
            for _ in 0..rng.random_range(2..5) {
                let vertical = rng.random_bool(0.5);
                let thick = rng.random_range(1..3);
                let (x1, y1, ww, hh) = if vertical {
                    (x0 + rng.random_range(0..gw - thick + 1), y0, thick, gh)
                } else {
                    (x0, y0 + rng.random_range(0..gh - thick + 1), gw, thick)
                };
                for y in y1..(y1 + hh).min(h) {
                    for x in x1..(x1 + ww).min(w) {
                        values[y * w + x] = ink;
                        labels[y * w + x] = id;
                    }
                }
            }
        }
    }
    Structure { values, labels, objects: id }
}

fn structure(kind: SceneKind, w: usize, h: usize, rng: &mut ChaCha8Rng) -> Structure {
    match kind {
        SceneKind::Gradient => gradient(w, h, rng),
        SceneKind::Checker => checker(w, h, rng),
        SceneKind::Blobs => blobs(w, h, rng),
        SceneKind::TextLike => text_like(w, h, rng),
    }
}

fn check_dims(width: usize, height: usize, bands: usize) -> Result<()> {
    if width < MIN_SCENE_SIZE || height < MIN_SCENE_SIZE {
        return Err(param_err!("scenes must be at least {MIN_SCENE_SIZE}x{MIN_SCENE_SIZE}, got {width}x{height}"));
    }
    if bands == 0 {
        return Err(param_err!("scenes need at least one band"));
    }
    Ok(())
}

/// `make_scene(kind, width, height, bands, seed)`.
pub fn make_scene<T: Scalar>(
    kind: SceneKind,
    width: usize,
    height: usize,
    bands: usize,
    seed: u64,
) -> Result<Raster<T>> {
    check_dims(width, height, bands)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let st = structure(kind, width, height, &mut rng);
    let mut data = Vec::with_capacity(width * height * bands);
    for _ in 0..bands {
        let gain = rng.random_range(0.6..1.0);
        let offset = rng.random_range(0.0..0.08);
        let jitter: Vec<f64> = (0..=st.objects).map(|_| rng.random_range(-0.12..0.12)).collect();
        // two broad Gaussian bumps of random sign
        let bumps: Vec<(f64, f64, f64, f64)> = (0..2)
            .map(|_| {
                (
                    rng.random_range(0.0..width as f64),
                    rng.random_range(0.0..height as f64),
                    rng.random_range(0.15..0.4) * width as f64,
                    rng.random_range(-0.06..0.06),
                )
            })
            .collect();
        for y in 0..height {
            for x in 0..width {
                let i = y * width + x;
                let label = st.labels[i];
                let spectral = if label == 0 { 0.0 } else { jitter[label] };
                let smooth: f64 = bumps
                    .iter()
                    .map(|&(cx, cy, r, a)| {
                        let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                        a * (-d2 / (2.0 * r * r)).exp()
                    })
                    .sum();
                let v = gain * st.values[i] + offset + spectral + smooth;
                data.push(lit(v.clamp(0.0, 1.0)));
            }
        }
    }
    Raster::from_vec(width, height, bands, data)
}

/// Scene with explicit per-band `gains` and `offsets` and no spectral tint:
/// band `b` is `clamp(gains[b] · S + offsets[b], 0, 1)`.
pub fn make_scene_with_gains<T: Scalar>(
    kind: SceneKind,
    width: usize,
    height: usize,
    gains: &[T],
    offsets: &[T],
    seed: u64,
) -> Result<Raster<T>> {
    check_dims(width, height, gains.len())?;
    if offsets.len() != gains.len() {
        return Err(param_err!("{} gains but {} offsets", gains.len(), offsets.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let st = structure(kind, width, height, &mut rng);
    let mut data = Vec::with_capacity(width * height * gains.len());
    for (&g, &o) in gains.iter().zip(offsets) {
        data.extend(st.values.iter().map(|&s| {
            let v = g * lit::<T>(s) + o;
            v.max(T::zero()).min(T::one())
        }));
    }
    Raster::from_vec(width, height, gains.len(), data)
}
