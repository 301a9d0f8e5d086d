//! Run manifests: everything needed to reproduce a command bit for bit
//! (plus the wall time, which reruns are allowed to differ in).

use crate::CliResult;
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub version: String,
    pub rng: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chains: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_per_chain: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thinning: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            argv: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng: purikit::sampler::GENERATOR_NAME.to_string(),
            seed: None,
            chains: None,
            n_per_chain: None,
            burn_in: None,
            thinning: None,
            protocol: None,
            policy: None,
            iterations: None,
            rounds: None,
            subset_size: None,
            restarts: None,
            threads: None,
            wall_time_seconds: 0.0,
        }
    }

    /// Writes the manifest next to `out` as `<out>.manifest.json`.
    pub fn write_next_to(&self, out: &Path) -> CliResult<PathBuf> {
        let path = manifest_path(out);
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| crate::CliError::Io(e.to_string()))?;
        std::fs::write(&path, json)?;
        Ok(path)
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}
