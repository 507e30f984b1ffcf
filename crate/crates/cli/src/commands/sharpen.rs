use std::path::PathBuf;

use anyhow::{Context, Result};
use arfpan::arf::sig9;
use arfpan::{
    arf_fuse, contraction_constant, fuse_brovey, fuse_gs, fuse_ihs, fuse_sfim, fuse_upsample, IterationConfig,
    Raster64,
};
use clap::ValueEnum;
use serde_json::{json, Value};

use crate::bank_args::BankArgs;
use crate::files::{parse_weights, read_raster, write_raster, write_text};
use crate::manifest::{manifest_path, Recorder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Arf,
    Ihs,
    Brovey,
    Gs,
    Sfim,
    Upsample,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long, value_enum, default_value_t = Method::Arf)]
    method: Method,
    #[arg(long)]
    lr: PathBuf,
    #[arg(long)]
    pan: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Outer iterations K.
    #[arg(long, default_value_t = 5)]
    iters: usize,
    /// Intensity-branch steps per outer iteration.
    #[arg(long, default_value_t = 1)]
    pan_steps: usize,
    /// Stop early once the RMS change between iterates drops below this.
    #[arg(long, default_value_t = 0.0)]
    tolerance: f64,
    #[command(flatten)]
    banks: BankArgs,
    /// Comma-separated intensity weights; uniform by default.
    #[arg(long)]
    weights: Option<String>,
    /// Write the iteration trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the final intensity estimate.
    #[arg(long)]
    intensity_out: Option<PathBuf>,
    /// Clamp the fused raster to [0, 1] before writing.
    #[arg(long)]
    clamp: bool,
}

pub fn run(a: Args) -> Result<()> {
    let mut rec = Recorder::start("sharpen");
    let lr = read_raster(&a.lr)?;
    let pan = read_raster(&a.pan)?;
    rec.input(&a.lr)?;
    rec.input(&a.pan)?;
    let w = parse_weights(a.weights.as_deref(), lr.bands())?;

    let mut details = Value::Null;
    let mut params = json!({
        "method": format!("{:?}", a.method).to_lowercase(),
        "weights": w.as_slice(),
        "clamp": a.clamp,
    });
    let (fused, intensity): (Raster64, Option<Raster64>) = match a.method {
        Method::Arf => {
            let banks = a.banks.build()?;
            let cfg = IterationConfig {
                iterations: a.iters,
                residual_tolerance: a.tolerance,
                record_trace: true,
                pan_steps: a.pan_steps,
            };
            let (gw, gh) = (pan.width(), pan.height());
            let mut verify = serde_json::Map::new();
            for (name, bank) in [("ms", &banks.ms), ("pan", &banks.pan)] {
                let rep = contraction_constant(bank, gw, gh)?;
                if !rep.is_contraction() {
                    eprintln!(
                        "warning: {name} bank has contraction constant {} on {gw}x{gh}; convergence is not certified",
                        sig9(rep.c)
                    );
                }
                verify.insert(name.into(), serde_json::to_value(&rep)?);
            }
            let out = arf_fuse(&lr, &pan, &banks.ms, &banks.pan, &w, &cfg)?;
            if let Some(t) = &a.trace {
                write_text(t, &out.trace.to_csv())?;
                rec.output(t);
            }
            params["iters"] = json!(a.iters);
            params["pan_steps"] = json!(a.pan_steps);
            params["tolerance"] = json!(a.tolerance);
            params["ms_bank"] = json!(banks.ms_config.to_text());
            params["pan_bank"] = json!(banks.pan_config.to_text());
            details = json!({
                "iterations_run": out.iterations,
                "final_ms_residual": sig9(out.final_ms_residual),
                "contraction": verify,
            });
            (out.fused, Some(out.intensity_estimate))
        }
        Method::Ihs => (fuse_ihs(&lr, &pan, &w)?, None),
        Method::Brovey => (fuse_brovey(&lr, &pan, &w)?, None),
        Method::Gs => (fuse_gs(&lr, &pan, &w)?, None),
        Method::Sfim => (fuse_sfim(&lr, &pan, &w)?, None),
        Method::Upsample => (fuse_upsample(&lr, &pan)?, None),
    };

    let fused = if a.clamp { fused.clamp_unit() } else { fused };
    write_raster(&a.out, &fused)?;
    rec.output(&a.out);
    if let Some(p) = &a.intensity_out {
        let i = match intensity {
            Some(i) => i,
            None => arfpan::intensity(&fused, &w)?,
        };
        write_raster(p, &i)?;
        rec.output(p);
    }
    rec.finish(params, details, &manifest_path(&a.out)).context("writing manifest")?;
    Ok(())
}
