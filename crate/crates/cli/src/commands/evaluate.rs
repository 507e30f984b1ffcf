use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use arfpan::metrics::{EvalInputs, CSV_HEADER};
use arfpan::{evaluate, MetricReport, Raster64};
use serde_json::json;

use crate::files::{parse_weights, read_raster, write_text};
use crate::manifest::{manifest_path, Recorder};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long, required_unless_present = "batch")]
    fused: Option<PathBuf>,
    /// Reference raster; enables PSNR, SSIM, SAM, ERGAS, SCC, Q and the losses.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// LR input and PAN; together they enable D_lambda, D_s and QNR.
    #[arg(long)]
    lr: Option<PathBuf>,
    #[arg(long)]
    pan: Option<PathBuf>,
    /// Intensity estimate of the fuser, used by the SSIM loss term.
    #[arg(long)]
    intensity: Option<PathBuf>,
    /// Resolution ratio for ERGAS when LR/PAN are not given.
    #[arg(long, default_value_t = 4)]
    ratio: usize,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Directory of scene subdirectories, each holding `fused.mbr` and
    /// optionally `gt.mbr`, `lr.mbr`, `pan.mbr`; prints one CSV row per scene.
    #[arg(long, conflicts_with_all = ["fused", "gt", "lr", "pan", "intensity"])]
    batch: Option<PathBuf>,
    /// Write the report here instead of stdout, with a manifest alongside.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Paths<'a> {
    fused: &'a Path,
    gt: Option<&'a Path>,
    lr: Option<&'a Path>,
    pan: Option<&'a Path>,
    intensity: Option<&'a Path>,
}

fn report_for(a: &Args, p: &Paths<'_>, rec: &mut Recorder) -> Result<MetricReport> {
    let load = |path: Option<&Path>, rec: &mut Recorder| -> Result<Option<Raster64>> {
        match path {
            None => Ok(None),
            Some(path) => {
                rec.input(path)?;
                read_raster(path).map(Some)
            }
        }
    };
    let fused = load(Some(p.fused), rec)?.expect("fused path given");
    let gt = load(p.gt, rec)?;
    let lr = load(p.lr, rec)?;
    let pan = load(p.pan, rec)?;
    let intensity = load(p.intensity, rec)?;
    let w = parse_weights(a.weights.as_deref(), fused.bands())?;
    let inputs = EvalInputs {
        fused: &fused,
        gt: gt.as_ref(),
        lr: lr.as_ref(),
        pan: pan.as_ref(),
        fused_intensity: intensity.as_ref(),
        weights: Some(&w),
        ratio: a.ratio,
        lambda: a.lambda,
    };
    Ok(evaluate(&inputs)?)
}

fn existing(dir: &Path, name: &str) -> Option<PathBuf> {
    let p = dir.join(name);
    p.is_file().then_some(p)
}

fn batch(a: &Args, dir: &Path, rec: &mut Recorder) -> Result<String> {
    let mut scenes: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("fused.mbr").is_file())
        .collect();
    scenes.sort();
    if scenes.is_empty() {
        bail!("no scene directory with fused.mbr under {}", dir.display());
    }
    let mut out = format!("{CSV_HEADER}\n");
    for s in &scenes {
        let (gt, lr, pan, intensity) =
            (existing(s, "gt.mbr"), existing(s, "lr.mbr"), existing(s, "pan.mbr"), existing(s, "intensity.mbr"));
        let paths = Paths {
            fused: &s.join("fused.mbr"),
            gt: gt.as_deref(),
            lr: lr.as_deref(),
            pan: pan.as_deref(),
            intensity: intensity.as_deref(),
        };
        let rep = report_for(a, &paths, rec).with_context(|| format!("scene {}", s.display()))?;
        let name = s.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        out.push_str(&rep.to_csv_row(&name));
        out.push('\n');
    }
    Ok(out)
}

pub fn run(a: Args) -> Result<()> {
    let mut rec = Recorder::start("evaluate");
    let text = match &a.batch {
        Some(dir) => batch(&a, dir, &mut rec)?,
        None => {
            let fused = a.fused.as_deref().expect("clap enforces --fused");
            let paths = Paths {
                fused,
                gt: a.gt.as_deref(),
                lr: a.lr.as_deref(),
                pan: a.pan.as_deref(),
                intensity: a.intensity.as_deref(),
            };
            let rep = report_for(&a, &paths, &mut rec)?;
            if a.csv {
                let name = fused.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                format!("{CSV_HEADER}\n{}\n", rep.to_csv_row(&name))
            } else {
                serde_json::to_string_pretty(&rep.to_json())? + "\n"
            }
        }
    };
    match &a.out {
        None => print!("{text}"),
        Some(p) => {
            write_text(p, &text)?;
            rec.output(p);
            let params = json!({
                "ratio": a.ratio,
                "lambda": a.lambda,
                "weights": a.weights,
                "format": if a.csv || a.batch.is_some() { "csv" } else { "json" },
                "batch": a.batch.as_ref().map(|b| b.display().to_string()),
            });
            rec.finish(params, serde_json::Value::Null, &manifest_path(p))?;
        }
    }
    Ok(())
}
