//! The JSON run configuration shared by every CLI subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data_model::access;
use crate::detectors::DetectorParams;
use crate::error::{Error, Result};
use crate::evaluation::MethodsConfig;
use crate::llm::LlmSettings;
use crate::metafeatures::DEFAULT_SAMPLE_BUDGET;
use crate::registry::Registry;

pub const CONFIG_VERSION: &str = "oodselect-config-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub version: String,
    /// Candidate detectors, in tie-breaking order.
    pub registry: Vec<String>,
    pub detectors: DetectorParams,
    pub methods: MethodsConfig,
    /// Train clips drawn per pair for meta-features.
    pub sample_budget: usize,
    /// Seeds clip sampling and meta-train/test splits. `--seed` overrides it.
    pub seed: u64,
    pub test_fraction: f64,
    pub llm: LlmSettings,
    /// Optional embedding file of model descriptor vectors keyed by model id.
    pub descriptors: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION.into(),
            registry: Registry::detectors().ids().to_vec(),
            detectors: DetectorParams::default(),
            methods: MethodsConfig::default(),
            sample_budget: DEFAULT_SAMPLE_BUDGET,
            seed: 0,
            test_fraction: 0.25,
            llm: LlmSettings::default(),
            descriptors: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::json(origin, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_json(&access::read_string(path)?, &path.display().to_string())?;
        if let Some(d) = &cfg.descriptors {
            if d.is_relative() {
                cfg.descriptors = Some(path.parent().unwrap_or(Path::new("")).join(d));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::invalid(format!("config version {:?}, expected {CONFIG_VERSION:?}", self.version)));
        }
        self.registry()?.detector_ids()?;
        if self.sample_budget == 0 {
            return Err(Error::invalid("sample_budget must be at least 1"));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::invalid("test_fraction must be in (0, 1)"));
        }
        Ok(())
    }

    pub fn registry(&self) -> Result<Registry> {
        Registry::new(self.registry.clone())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
