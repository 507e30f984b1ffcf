use anyhow::{bail, Result};
use arfpan::arf::sig9;
use arfpan::contraction_constant;
use serde_json::json;

use crate::bank_args::BankArgs;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    banks: BankArgs,
    /// DFT grid, `N` or `WxH`; the working image size.
    #[arg(long, default_value = "128")]
    grid: String,
    /// Print a JSON report instead of text lines.
    #[arg(long)]
    json: bool,
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| anyhow::anyhow!("invalid grid `{s}`"));
    match s.split_once(['x', 'X']) {
        Some((w, h)) => Ok((parse(w)?, parse(h)?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

/// Returns whether both banks are certified contractions.
pub fn run(a: Args) -> Result<bool> {
    let (gw, gh) = parse_grid(&a.grid)?;
    if gw == 0 || gh == 0 {
        bail!("grid must be positive");
    }
    let banks = a.banks.build()?;
    let mut all = true;
    let mut report = serde_json::Map::new();
    for (name, bank) in [("ms", &banks.ms), ("pan", &banks.pan)] {
        let rep = contraction_constant(bank, gw, gh)?;
        let ok = rep.is_contraction();
        all &= ok;
        if a.json {
            report.insert(name.into(), json!({ "report": rep, "pass": ok }));
        } else {
            println!(
                "{name:<3} M={:<2} c={} min_response={} argmax=({},{}) grid={gw}x{gh} {}",
                bank.max_size(),
                sig9(rep.c),
                sig9(rep.min_response),
                rep.argmax.0,
                rep.argmax.1,
                if ok { "PASS" } else { "FAIL" }
            );
        }
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(all)
}
