//! MBR raster files and 8-bit PGM/PPM visualization exports.
//!
//! MBR layout: the ASCII header
//!
//! ```text
//! MBR1
//! width=<u>
//! height=<u>
//! bands=<u>
//! dtype=f32le
//!
//! ```
//!
//! followed by band-sequential, row-major IEEE-754 binary32 little-endian samples.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::raster::Raster;
use crate::scalar::{lit, Scalar};

pub const MBR_MAGIC: &str = "MBR1";

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn write_mbr<T: Scalar, W: Write>(r: &Raster<T>, mut out: W) -> Result<()> {
    write!(
        out,
        "{MBR_MAGIC}\nwidth={}\nheight={}\nbands={}\ndtype=f32le\n\n",
        r.width(),
        r.height(),
        r.bands()
    )?;
    let mut buf = Vec::with_capacity(r.samples().len() * 4);
    for v in r.samples() {
        let s = v.to_f32().ok_or_else(|| Error::Numeric(format!("sample {v} not representable as f32")))?;
        buf.extend_from_slice(&s.to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

fn header_line<R: BufRead>(input: &mut R) -> Result<String> {
    let mut line = Vec::new();
    input.read_until(b'\n', &mut line)?;
    if line.pop() != Some(b'\n') {
        return Err(format_err("truncated MBR header"));
    }
    String::from_utf8(line).map_err(|_| format_err("MBR header is not ASCII"))
}

fn header_field<R: BufRead>(input: &mut R, key: &str) -> Result<String> {
    let line = header_line(input)?;
    match line.split_once('=') {
        Some((k, v)) if k == key => Ok(v.to_string()),
        _ => Err(format_err(format!("expected `{key}=` in MBR header, found `{line}`"))),
    }
}

fn header_dim<R: BufRead>(input: &mut R, key: &str) -> Result<usize> {
    let v = header_field(input, key)?;
    v.parse::<usize>()
        .map_err(|_| format_err(format!("invalid {key} `{v}` in MBR header")))
}

pub fn read_mbr<T: Scalar, R: BufRead>(mut input: R) -> Result<Raster<T>> {
    if header_line(&mut input)? != MBR_MAGIC {
        return Err(format_err("missing MBR1 magic"));
    }
    let width = header_dim(&mut input, "width")?;
    let height = header_dim(&mut input, "height")?;
    let bands = header_dim(&mut input, "bands")?;
    let dtype = header_field(&mut input, "dtype")?;
    if dtype != "f32le" {
        return Err(format_err(format!("unsupported MBR dtype `{dtype}`")));
    }
    if !header_line(&mut input)?.is_empty() {
        return Err(format_err("MBR header must end with a blank line"));
    }
    let n = width
        .checked_mul(height)
        .and_then(|v| v.checked_mul(bands))
        .ok_or_else(|| format_err("MBR dimensions overflow"))?;
    let mut bytes = Vec::with_capacity(n * 4);
    input.read_to_end(&mut bytes)?;
    if bytes.len() != n * 4 {
        return Err(format_err(format!(
            "MBR payload has {} bytes, expected {}",
            bytes.len(),
            n * 4
        )));
    }
    let data = bytes
        .chunks_exact(4)
        .map(|c| T::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])).unwrap_or(T::nan()))
        .collect();
    Raster::from_vec(width, height, bands, data).map_err(|e| match e {
        Error::Numeric(m) => format_err(format!("MBR payload: {m}")),
        other => other,
    })
}

/// `round(255 · clamp(v, 0, 1))`.
fn quantize<T: Scalar>(v: T) -> u8 {
    let c = v.max(T::zero()).min(T::one());
    (c * lit(255.0)).round().to_u8().unwrap_or(0)
}

/// Single-band binary PGM (P5). Multi-band rasters export band 0.
pub fn write_pgm<T: Scalar, W: Write>(r: &Raster<T>, mut out: W) -> Result<()> {
    write!(out, "P5\n{} {}\n255\n", r.width(), r.height())?;
    let bytes: Vec<u8> = r.band(0).iter().map(|&v| quantize(v)).collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

/// Binary PPM (P6) from the first three bands; fewer bands are repeated.
pub fn write_ppm<T: Scalar, W: Write>(r: &Raster<T>, mut out: W) -> Result<()> {
    write!(out, "P6\n{} {}\n255\n", r.width(), r.height())?;
    let pick = |c: usize| r.band(c.min(r.bands() - 1));
    let (red, green, blue) = (pick(0), pick(1), pick(2));
    let mut bytes = Vec::with_capacity(r.plane_len() * 3);
    for i in 0..r.plane_len() {
        bytes.extend_from_slice(&[quantize(red[i]), quantize(green[i]), quantize(blue[i])]);
    }
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

fn pnm_token<R: BufRead>(input: &mut R) -> Result<String> {
    let mut tok = String::new();
    let mut byte = [0u8; 1];
    loop {
        if input.read(&mut byte)? == 0 {
            return Err(format_err("truncated PNM header"));
        }
        let c = byte[0];
        if c == b'#' && tok.is_empty() {
            let mut skip = Vec::new();
            input.read_until(b'\n', &mut skip)?;
            continue;
        }
        if c.is_ascii_whitespace() {
            if tok.is_empty() {
                continue;
            }
            return Ok(tok);
        }
        tok.push(c as char);
    }
}

/// Reads an 8-bit binary PGM (1 band) or PPM (3 bands) with values `v / maxval`.
pub fn read_pnm<T: Scalar, R: BufRead>(mut input: R) -> Result<Raster<T>> {
    let magic = pnm_token(&mut input)?;
    let bands = match magic.as_str() {
        "P5" => 1,
        "P6" => 3,
        other => return Err(format_err(format!("unsupported PNM magic `{other}`"))),
    };
    let mut num = |what: &str| -> Result<usize> {
        let t = pnm_token(&mut input)?;
        t.parse().map_err(|_| format_err(format!("invalid PNM {what} `{t}`")))
    };
    let width = num("width")?;
    let height = num("height")?;
    let maxval = num("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(format_err(format!("only 8-bit PNM is supported, maxval {maxval}")));
    }
    let mut bytes = vec![0u8; width * height * bands];
    input
        .read_exact(&mut bytes)
        .map_err(|_| format_err("truncated PNM payload"))?;
    let scale: T = lit(maxval as f64);
    let plane = width * height;
    let data = (0..plane * bands)
        .map(|i| {
            let (b, p) = (i / plane, i % plane);
            T::from(bytes[p * bands + b]).unwrap() / scale
        })
        .collect();
    Raster::from_vec(width, height, bands, data)
}
