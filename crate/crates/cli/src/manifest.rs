use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use crate::files::{sha256_file, write_text};

/// Record of one command run, enough to replay it.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: &'static str,
    pub parameters: Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub duration_seconds: f64,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

pub struct Recorder {
    command: &'static str,
    started: Instant,
    inputs: BTreeMap<String, String>,
    outputs: Vec<PathBuf>,
}

impl Recorder {
    pub fn start(command: &'static str) -> Self {
        Self { command, started: Instant::now(), inputs: BTreeMap::new(), outputs: Vec::new() }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn finish(self, parameters: Value, details: Value, dest: &Path) -> Result<()> {
        let mut outputs = BTreeMap::new();
        for p in &self.outputs {
            outputs.insert(p.display().to_string(), sha256_file(p)?);
        }
        let m = RunManifest {
            command: self.command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            parameters,
            inputs: self.inputs,
            outputs,
            duration_seconds: self.started.elapsed().as_secs_f64(),
            details,
        };
        write_text(dest, &(serde_json::to_string_pretty(&m)? + "\n"))
    }
}

/// `fused.mbr` → `fused.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}
