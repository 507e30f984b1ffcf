use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use arfpan::{BankConfig, MultiScaleFilter64, SigmaRule};
use clap::Args;

/// Filter bank flags for both branches.
#[derive(Args, Clone, Debug)]
pub struct BankArgs {
    /// Largest kernel size M of the multispectral bank.
    #[arg(long, default_value_t = 17)]
    pub max_kernel: usize,
    /// `quarter` (σ = size/4) or `size/<d>`.
    #[arg(long, default_value = "quarter")]
    pub sigma_rule: SigmaRule,
    /// key=value bank file for the multispectral branch; overrides the flags.
    #[arg(long)]
    pub gamma_file: Option<PathBuf>,
    /// Largest kernel size of the intensity-branch bank (1 = Dirac).
    #[arg(long, default_value_t = 1)]
    pub pan_max_kernel: usize,
    #[arg(long, default_value = "quarter")]
    pub pan_sigma_rule: SigmaRule,
    /// key=value bank file for the intensity branch.
    #[arg(long)]
    pub pan_gamma_file: Option<PathBuf>,
}

fn resolve(max: usize, rule: SigmaRule, file: Option<&PathBuf>) -> Result<BankConfig> {
    let base = BankConfig { sigma_rule: rule, ..BankConfig::with_max_size(max) };
    match file {
        None => Ok(base),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            BankConfig::parse_onto(&text, base).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

pub struct Banks {
    pub ms_config: BankConfig,
    pub pan_config: BankConfig,
    pub ms: MultiScaleFilter64,
    pub pan: MultiScaleFilter64,
}

impl BankArgs {
    pub fn build(&self) -> Result<Banks> {
        let ms_config = resolve(self.max_kernel, self.sigma_rule, self.gamma_file.as_ref())?;
        let pan_config = resolve(self.pan_max_kernel, self.pan_sigma_rule, self.pan_gamma_file.as_ref())?;
        let ms = ms_config.build().context("multispectral bank")?;
        let pan = pan_config.build().context("intensity bank")?;
        Ok(Banks { ms_config, pan_config, ms, pan })
    }
}
