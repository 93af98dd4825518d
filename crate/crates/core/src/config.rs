//! Run configuration shared by the library and the command-line tool.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::AlignmentConfig;
use crate::retrieval::RetrievalConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid retrieval config: {0}")]
    Retrieval(String),
    #[error("invalid alignment config: {0}")]
    Alignment(String),
    #[error("workers must be >= 1")]
    Workers,
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl ConfigError {
    /// True for problems with the file itself rather than its values.
    pub fn is_io(&self) -> bool {
        matches!(self, ConfigError::Io { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub retrieval: RetrievalConfig,
    pub alignment: AlignmentConfig,
    /// Builtin bundle name or resource directory.
    pub resources: String,
    pub workers: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            retrieval: RetrievalConfig::default(),
            alignment: AlignmentConfig::default(),
            resources: "fa".to_string(),
            workers: 1,
        }
    }
}

/// The shipped defaults, kept in sync with `Config::default()` by a test.
pub const DEFAULTS_JSON: &str = include_str!("../resources/defaults.json");

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.retrieval.validate()?;
        self.alignment.validate()?;
        if self.workers == 0 {
            return Err(ConfigError::Workers);
        }
        Ok(())
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: Config = serde_json::from_str(text).map_err(|source| ConfigError::Parse {
            path: origin.to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }
}
