use std::fmt::Write as _;

use serde::Serialize;

/// Diagnostics of one outer iteration, all as RMS over samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub k: usize,
    /// `‖L̂ − f(H^k)‖`.
    pub ms_residual: f64,
    /// `‖P − g(H̃_I^k)‖`.
    pub pan_residual: f64,
    /// `‖H^{k+1} − H^k‖`.
    pub delta: f64,
    /// `ms_residual_k / ms_residual_{k-1}`; absent for the first step.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
}

/// Nine significant digits, scientific notation.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_finite() {
        format!("{v:.8e}")
    } else {
        v.to_string()
    }
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn ms_residuals(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.ms_residual).collect()
    }

    pub fn pan_residuals(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.pan_residual).collect()
    }

    pub(crate) fn push(&mut self, k: usize, ms_residual: f64, pan_residual: f64, delta: f64) {
        let ratio = self.steps.last().map(|p| ms_residual / p.ms_residual);
        self.steps.push(TraceStep { k, ms_residual, pan_residual, delta, ratio });
    }

    /// CSV with header `k,ms_residual,pan_residual,delta,ratio`; the first
    /// row leaves `ratio` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,ms_residual,pan_residual,delta,ratio\n");
        for s in &self.steps {
            let ratio = s.ratio.map(sig9).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.k,
                sig9(s.ms_residual),
                sig9(s.pan_residual),
                sig9(s.delta),
                ratio
            );
        }
        out
    }
}
