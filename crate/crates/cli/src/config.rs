//! Optional JSON config file: every command-line flag has a counterpart
//! here, flags win on conflict. Unknown keys are rejected so typos surface
//! instead of silently falling back to defaults.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<crate::Format>,
    #[serde(default)]
    pub chsh_stats: ChshSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub guess: GuessSection,
    #[serde(default)]
    pub entropy: EntropySection,
    #[serde(default)]
    pub design: DesignSection,
    #[serde(default)]
    pub extract: ExtractSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshSection {
    pub pair: Option<String>,
    pub rounds: Option<u64>,
    pub fa: Option<String>,
    pub fb: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub protocol: Option<String>,
    pub pair: Option<String>,
    pub fa: Option<String>,
    pub fb: Option<String>,
    pub ell: Option<u64>,
    pub delta: Option<u64>,
    pub c: Option<f64>,
    pub k_override: Option<u64>,
    pub m_override: Option<u64>,
    pub bell_probability: Option<f64>,
    pub mismatch_threshold_fraction: Option<f64>,
    pub window_low: Option<f64>,
    pub window_high: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuessSection {
    pub pair: Option<String>,
    pub fa: Option<String>,
    pub fb: Option<String>,
    pub gamma: Option<f64>,
    pub b0_seed: Option<u64>,
    pub k: Option<u64>,
    pub trials: Option<u64>,
    pub decision_radius: Option<f64>,
    pub b0_mode: Option<String>,
    pub b0_hex: Option<String>,
    pub calibration_samples: Option<u64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropySection {
    pub input: Option<PathBuf>,
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub r: Option<u64>,
    pub set_size: Option<u64>,
    pub rho: Option<f64>,
    pub budget: Option<u64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractSection {
    pub m: Option<u64>,
    pub t: Option<u64>,
    pub r: Option<u64>,
    pub budget: Option<u64>,
    pub input_hex: Option<String>,
    pub seed_hex: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub file: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing config file {}", path.display()))
    }
}

/// Resolves a required setting: flag beats config file, absence is an error.
pub fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file)
        .with_context(|| format!("{name} is required (pass --{name} or set it in the config file)"))
}

/// Resolves an optional setting with a default.
pub fn resolve<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
