//! TOML configuration. Every section and field is optional.
//!
//! ```toml
//! [library]
//! body_key = "High_Impact_Skills_Library"
//!
//! [summary]
//! hint_max = 100
//!
//! [routing]
//! k_max = 3
//! threshold = 0.05
//!
//! [remote]
//! endpoint = "http://localhost:8080/v1/chat/completions"
//! model = "some-model"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::DEFAULT_TOKEN_BUDGET;
use crate::guidance::{PromptConfig, SummaryConfig};
use crate::library::{LibraryFormat, DEFAULT_BODY_KEY};
use crate::prefix::{PrefixOptions, ReadMode, DEFAULT_SUMMARY_BUDGET};
use crate::retrieval::{RemoteConfig, DEFAULT_K_MAX, DEFAULT_THRESHOLD};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("could not read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LibrarySection {
    pub body_key: String,
}

impl Default for LibrarySection {
    fn default() -> Self {
        Self { body_key: DEFAULT_BODY_KEY.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoutingSection {
    pub k_max: usize,
    pub threshold: f64,
    pub block_size: usize,
    /// Accept files whose summary is present but not first.
    pub lenient: bool,
    pub extension: String,
    pub summary_budget: usize,
}

impl Default for RoutingSection {
    fn default() -> Self {
        Self {
            k_max: DEFAULT_K_MAX,
            threshold: DEFAULT_THRESHOLD,
            block_size: PrefixOptions::default().block_size,
            lenient: false,
            extension: "json".into(),
            summary_budget: DEFAULT_SUMMARY_BUDGET,
        }
    }
}

impl RoutingSection {
    pub fn prefix_options(&self) -> PrefixOptions {
        PrefixOptions { block_size: self.block_size, mode: if self.lenient { ReadMode::Lenient } else { ReadMode::Strict } }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusSection {
    pub token_budget: usize,
}

impl Default for CorpusSection {
    fn default() -> Self {
        Self { token_budget: DEFAULT_TOKEN_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub library: LibrarySection,
    pub summary: SummaryConfig,
    pub prompts: PromptConfig,
    pub routing: RoutingSection,
    pub corpus: CorpusSection,
    pub remote: Option<RemoteConfig>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    fn check(&self) -> Result<(), ConfigError> {
        if self.summary.hint_max == 0 {
            return Err(ConfigError::Invalid("summary.hint_max must be positive".into()));
        }
        if self.routing.k_max == 0 {
            return Err(ConfigError::Invalid("routing.k_max must be at least 1".into()));
        }
        if self.routing.block_size == 0 {
            return Err(ConfigError::Invalid("routing.block_size must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.routing.threshold) {
            return Err(ConfigError::Invalid("routing.threshold must lie in [0, 1]".into()));
        }
        self.prompts.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn format(&self) -> LibraryFormat {
        LibraryFormat::new(self.library.body_key.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_all_defaults() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn partial_sections() {
        let cfg = Config::parse(
            "[routing]\nk_max = 2\n[summary]\nhint_max = 80\n[remote]\nendpoint = \"http://x\"\nmodel = \"m\"\n",
        )
        .unwrap();
        assert_eq!(cfg.routing.k_max, 2);
        assert_eq!(cfg.routing.threshold, DEFAULT_THRESHOLD);
        assert_eq!(cfg.summary.hint_max, 80);
        let remote = cfg.remote.unwrap();
        assert_eq!(remote.api_key_env, "SDSR_API_KEY");
        assert_eq!(remote.content_path, "choices.0.message.content");
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Config::parse("[routing]\nk_max = 0\n").is_err());
        assert!(Config::parse("[routing]\nthreshold = 1.5\n").is_err());
        assert!(Config::parse("[summary]\nhint_max = 0\n").is_err());
        assert!(Config::parse("[routing]\nbogus = [").is_err());
    }
}
