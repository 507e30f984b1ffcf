//! `arfpan`: simulate Wald scenes, pan-sharpen, evaluate and inspect filter banks.

mod bank_args;
mod commands;
mod files;
mod manifest;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "arfpan", version, about = "Pan-sharpening by alternating reverse filtering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scene and its Wald-degraded inputs.
    Simulate(commands::simulate::Args),
    /// Fuse an LR multispectral raster with a PAN raster.
    Sharpen(commands::sharpen::Args),
    /// Compute quality metrics for a fused raster.
    Evaluate(commands::evaluate::Args),
    /// Report the contraction constant of the filter banks.
    Verify(commands::verify::Args),
    /// Convert between MBR, PGM and PPM.
    Convert(commands::convert::Args),
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ARF_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("ARF_THREADS must be a count, got `{raw}`"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    init_threads()?;
    match cli.command {
        Command::Simulate(a) => commands::simulate::run(a).map(|()| true),
        Command::Sharpen(a) => commands::sharpen::run(a).map(|()| true),
        Command::Evaluate(a) => commands::evaluate::run(a).map(|()| true),
        Command::Verify(a) => commands::verify::run(a),
        Command::Convert(a) => commands::convert::run(a).map(|()| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
