//! Appends one reproducibility record per invocation to the run log.

use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use oodselect_core::config::RunConfig;

use crate::Cli;

#[derive(Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub argv: Vec<String>,
    /// SHA-256 of the effective configuration's canonical JSON.
    pub config_sha256: Option<String>,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub version: String,
    pub parallel_feature: bool,
    pub exit_code: u8,
    pub unix_time: u64,
}

pub fn config_hash(cfg: &RunConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_json().as_bytes()))
}

pub fn append(cli: &Cli, cfg: Option<&RunConfig>, exit_code: u8) -> Result<()> {
    let path = &cli.run_log;
    let mut records: Vec<serde_json::Value> = match std::fs::read_to_string(path) {
        Ok(text) if !text.trim().is_empty() => {
            serde_json::from_str(&text).with_context(|| format!("{} is not a JSON array", path.display()))?
        }
        _ => Vec::new(),
    };
    let record = RunRecord {
        command: cli.command.name().to_string(),
        argv: std::env::args().skip(1).collect(),
        config_sha256: cfg.map(config_hash),
        seed: cfg.map(|c| c.seed),
        jobs: cli.jobs,
        version: env!("CARGO_PKG_VERSION").to_string(),
        parallel_feature: cfg!(feature = "parallel"),
        exit_code,
        unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    records.push(serde_json::to_value(record)?);
    let mut text = serde_json::to_string_pretty(&records)?;
    text.push('\n');
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
