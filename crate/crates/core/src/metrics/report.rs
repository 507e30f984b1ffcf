use serde::Serialize;
use serde_json::{json, Value};

use super::{loss_values, qnr_suite, reference::*};
use crate::arf::sig9;
use crate::error::{dim_err, Result};
use crate::raster::{intensity, scale_ratio, BandWeights, Raster};
use crate::scalar::{lit, to_f64, Scalar};

/// Column order of [`MetricReport::to_csv_row`].
pub const CSV_HEADER: &str = "scene,PSNR,SSIM,SAM,ERGAS,SCC,Q,D_lambda,D_s,QNR";

/// Inputs available to a metric run; reference metrics need `gt`, the
/// no-reference suite needs `lr` and `pan`.
#[derive(Clone, Debug)]
pub struct EvalInputs<'a, T> {
    pub fused: &'a Raster<T>,
    pub gt: Option<&'a Raster<T>>,
    pub lr: Option<&'a Raster<T>>,
    pub pan: Option<&'a Raster<T>>,
    /// Intensity estimate carried by the fuser; falls back to `intensity(fused)`.
    pub fused_intensity: Option<&'a Raster<T>>,
    pub weights: Option<&'a BandWeights<T>>,
    /// Used for ERGAS when `lr`/`pan` do not fix it.
    pub ratio: usize,
    pub lambda: f64,
}

impl<'a, T: Scalar> EvalInputs<'a, T> {
    pub fn new(fused: &'a Raster<T>) -> Self {
        Self { fused, gt: None, lr: None, pan: None, fused_intensity: None, weights: None, ratio: 4, lambda: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportMeta {
    pub lambda: f64,
    pub ratio: usize,
    pub ssim_window: usize,
    pub ssim_sigma: f64,
    pub q_window: usize,
    pub sam_unit: &'static str,
    pub qnr_alpha: f64,
    pub qnr_beta: f64,
    pub pan_degradation: String,
    pub scc_degenerate_bands: Vec<usize>,
}

/// Scalar metric values; `None` marks a metric that could not be computed
/// from the supplied inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    pub sam: Option<f64>,
    pub ergas: Option<f64>,
    pub scc: Option<f64>,
    pub q: Option<f64>,
    pub d_lambda: Option<f64>,
    pub d_s: Option<f64>,
    pub qnr: Option<f64>,
    pub l_r: Option<f64>,
    pub l_s: Option<f64>,
    pub l_sum: Option<f64>,
    pub meta: ReportMeta,
}

fn rounded(v: Option<f64>) -> Value {
    match v {
        Some(x) if x.is_finite() => sig9(x).parse::<f64>().map(Value::from).unwrap_or(Value::Null),
        _ => Value::Null,
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(sig9).unwrap_or_default()
}

impl MetricReport {
    /// PSNR with the identical-input sentinel replaced by the display cap.
    pub fn psnr_display(&self) -> Option<f64> {
        self.psnr.map(|p| p.min(PSNR_CAP_DB))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "psnr": rounded(self.psnr_display()),
            "ssim": rounded(self.ssim),
            "sam": rounded(self.sam),
            "ergas": rounded(self.ergas),
            "scc": rounded(self.scc),
            "q": rounded(self.q),
            "d_lambda": rounded(self.d_lambda),
            "d_s": rounded(self.d_s),
            "qnr": rounded(self.qnr),
            "l_r": rounded(self.l_r),
            "l_s": rounded(self.l_s),
            "l_sum": rounded(self.l_sum),
            "meta": self.meta,
        })
    }

    pub fn to_csv_row(&self, scene: &str) -> String {
        [
            scene.to_string(),
            cell(self.psnr_display()),
            cell(self.ssim),
            cell(self.sam),
            cell(self.ergas),
            cell(self.scc),
            cell(self.q),
            cell(self.d_lambda),
            cell(self.d_s),
            cell(self.qnr),
        ]
        .join(",")
    }
}

/// Computes every metric the inputs allow.
pub fn evaluate<T: Scalar>(inp: &EvalInputs<'_, T>) -> Result<MetricReport> {
    let fused = inp.fused;
    let uniform = BandWeights::uniform(fused.bands());
    let weights = inp.weights.unwrap_or(&uniform);
    let ratio = match (inp.lr, inp.pan) {
        (Some(lr), Some(pan)) => scale_ratio(lr, pan)?,
        (Some(lr), None) => scale_ratio(lr, fused)?,
        _ => inp.ratio,
    };
    let f = |v: T| Some(to_f64(v));

    let mut report = MetricReport {
        psnr: None,
        ssim: None,
        sam: None,
        ergas: None,
        scc: None,
        q: None,
        d_lambda: None,
        d_s: None,
        qnr: None,
        l_r: None,
        l_s: None,
        l_sum: None,
        meta: ReportMeta {
            lambda: inp.lambda,
            ratio,
            ssim_window: SSIM_WINDOW,
            ssim_sigma: SSIM_SIGMA,
            q_window: Q_WINDOW,
            sam_unit: "radians",
            qnr_alpha: 1.0,
            qnr_beta: 1.0,
            pan_degradation: format!("gaussian blur sigma={} then decimation by {ratio}", ratio as f64 / 2.0),
            scc_degenerate_bands: Vec::new(),
        },
    };

    if let Some(gt) = inp.gt {
        fused.ensure_same_shape(gt, "evaluate")?;
        report.psnr = f(psnr(fused, gt)?);
        report.ssim = f(ssim(fused, gt)?);
        if fused.bands() >= 2 {
            report.sam = f(sam(fused, gt)?);
        }
        report.ergas = f(ergas(fused, gt, ratio)?);
        let s = scc(fused, gt)?;
        report.scc = f(s.value);
        report.meta.scc_degenerate_bands = s.degenerate_bands;
        report.q = f(q_index(fused, gt)?);

        let computed;
        let fused_i = match inp.fused_intensity {
            Some(i) => i,
            None => {
                computed = intensity(fused, weights)?;
                &computed
            }
        };
        let gt_i = intensity(gt, weights)?;
        let loss = loss_values(fused, fused_i, gt, &gt_i, lit(inp.lambda))?;
        report.l_r = f(loss.l_r);
        report.l_s = f(loss.l_s);
        report.l_sum = f(loss.l_sum);
    }

    match (inp.lr, inp.pan) {
        (Some(lr), Some(pan)) => {
            let q = qnr_suite(fused, lr, pan)?;
            report.d_lambda = q.d_lambda.map(to_f64);
            report.d_s = Some(to_f64(q.d_s));
            report.qnr = q.qnr.map(to_f64);
        }
        (None, None) | (Some(_), None) => {}
        (None, Some(_)) => return Err(dim_err!("the no-reference suite needs the LR raster as well as the PAN")),
    }
    Ok(report)
}
