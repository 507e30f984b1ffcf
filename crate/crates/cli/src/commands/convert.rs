use std::path::PathBuf;

use anyhow::Result;
use serde_json::json;

use crate::files::{read_raster, write_raster};
use crate::manifest::{manifest_path, Recorder};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Source raster (.mbr, .pgm or .ppm).
    input: PathBuf,
    /// Destination raster; the format follows the extension.
    output: PathBuf,
    /// Skip writing the run manifest.
    #[arg(long)]
    no_manifest: bool,
}

pub fn run(a: Args) -> Result<()> {
    let mut rec = Recorder::start("convert");
    let r = read_raster(&a.input)?;
    rec.input(&a.input)?;
    write_raster(&a.output, &r)?;
    rec.output(&a.output);
    if !a.no_manifest {
        let params = json!({ "width": r.width(), "height": r.height(), "bands": r.bands() });
        rec.finish(params, serde_json::Value::Null, &manifest_path(&a.output))?;
    }
    Ok(())
}
