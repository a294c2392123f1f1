//! Run configuration: one JSON document, overridable from the command line.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qldpc_gkp::{DecoderConfig, LlrMode};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Bundle directory or manifest; relative paths resolve against the
    /// config file's directory.
    pub code: PathBuf,
    pub schedule: String,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    pub squeezing_db: Vec<f64>,
    #[serde(default = "default_modes")]
    pub modes: Vec<LlrMode>,
    #[serde(default)]
    pub decoder: DecoderConfig,
    #[serde(default = "default_failure_target")]
    pub failure_target: u64,
    #[serde(default = "default_trial_cap")]
    pub trial_cap: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_rounds() -> usize {
    3
}

fn default_modes() -> Vec<LlrMode> {
    LlrMode::ALL.to_vec()
}

fn default_failure_target() -> u64 {
    1000
}

fn default_trial_cap() -> u64 {
    qldpc_gkp::experiment::DEFAULT_TRIAL_CAP
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

impl RunConfig {
    /// Reads a config and makes its paths absolute relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.code = base.join(&config.code);
        config.out = base.join(&config.out);
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            bail!("rounds must be at least 1");
        }
        if self.squeezing_db.is_empty() {
            bail!("squeezing grid is empty");
        }
        if self.failure_target == 0 {
            bail!("failure target must be at least 1 (a zero target would report 0/0)");
        }
        self.decoder.validate()?;
        Ok(())
    }
}
