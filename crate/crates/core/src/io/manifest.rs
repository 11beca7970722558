use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::ResolvedConfig;
use crate::error::{Error, Result};

/// Reproducibility record written next to every output set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub timestamp: String,
    pub output_paths: Vec<String>,
    /// The resolved configuration, sufficient to rerun the computation.
    pub config: serde_json::Value,
}

/// SHA-256 of the canonical JSON form of the resolved configuration.
pub fn config_hash(config: &ResolvedConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("resolved config serializes");
    hex::encode(Sha256::digest(bytes))
}

/// UTC now, or `SOURCE_DATE_EPOCH` when set.
fn timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0));
    fixed
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

impl RunManifest {
    pub fn new(config: &ResolvedConfig, output_paths: Vec<String>) -> Self {
        Self {
            config_hash: config_hash(config),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
            output_paths,
            config: serde_json::to_value(config).expect("resolved config serializes"),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::parse_config;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = parse_config("delta_omega = 100\ntau_fwhm = 0.05\n").unwrap();
        let b = parse_config("tau_fwhm = 0.05\ndelta_omega = 100.0\nmode = \"one_color\"\n").unwrap();
        let c = parse_config("delta_omega = 100\ntau_fwhm = 0.5\n").unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&c));
        assert_eq!(config_hash(&a).len(), 64);
    }
}
