use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use arfpan::raster::{read_mbr, read_pnm, write_mbr, write_pgm, write_ppm};
use arfpan::{BandWeights, Raster64};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Mbr,
    Pgm,
    Ppm,
}

pub fn format_of(path: &Path) -> Result<Format> {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("mbr") => Ok(Format::Mbr),
        Some("pgm") => Ok(Format::Pgm),
        Some("ppm") => Ok(Format::Ppm),
        _ => bail!("{}: unknown raster extension (expected .mbr, .pgm or .ppm)", path.display()),
    }
}

pub fn read_raster(path: &Path) -> Result<Raster64> {
    let input = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    let r = match format_of(path)? {
        Format::Mbr => read_mbr(input),
        Format::Pgm | Format::Ppm => read_pnm(input),
    };
    r.with_context(|| format!("reading {}", path.display()))
}

pub fn write_raster(path: &Path, r: &Raster64) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    match format_of(path)? {
        Format::Mbr => write_mbr(r, &mut out),
        Format::Pgm => write_pgm(r, &mut out),
        Format::Ppm => write_ppm(r, &mut out),
    }
    .with_context(|| format!("writing {}", path.display()))?;
    out.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Comma-separated band weights; `None` means uniform.
pub fn parse_weights(text: Option<&str>, bands: usize) -> Result<BandWeights<f64>> {
    let Some(text) = text else {
        return Ok(BandWeights::uniform(bands));
    };
    let w = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("invalid weight `{t}`")))
        .collect::<Result<Vec<_>>>()?;
    if w.len() != bands {
        bail!("{} weights given for {bands} bands", w.len());
    }
    Ok(BandWeights::new(w)?)
}
