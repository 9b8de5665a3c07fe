use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::Deserialize;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid value for {key}: {reason}")]
    Value { key: &'static str, reason: String },
}

/// Service settings. Read from a TOML file, then overridden by `OAC_LISTEN`,
/// `OAC_DATA_DIR`, `OAC_BASE_URL`, `OAC_VOCABULARY` and `OAC_UI_DIR`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_listen")]
    pub listen: SocketAddr,
    #[serde(default = "default_data_dir")]
    pub data_dir: PathBuf,
    /// Public prefix of minted URIs. Defaults to `http://<listen>`.
    #[serde(default)]
    pub base_url: Option<String>,
    /// Vocabulary table overriding the built-in IRIs.
    #[serde(default)]
    pub vocabulary: Option<PathBuf>,
    /// Static files served under `/ui`.
    #[serde(default)]
    pub ui_dir: Option<PathBuf>,
}

fn default_listen() -> SocketAddr {
    DEFAULT_LISTEN.parse().unwrap()
}

fn default_data_dir() -> PathBuf {
    PathBuf::from("oac-data")
}

impl Default for Config {
    fn default() -> Self {
        Config {
            listen: default_listen(),
            data_dir: default_data_dir(),
            base_url: None,
            vocabulary: None,
            ui_dir: None,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Reads `path` (or `$OAC_CONFIG` when `path` is `None`, or defaults when
    /// neither is set) and applies environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        Self::load_with(path, |k| std::env::var(k).ok())
    }

    pub fn load_with(path: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let path = path
            .map(Path::to_path_buf)
            .or_else(|| env("OAC_CONFIG").map(PathBuf::from));
        let mut config = match path {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Read { path, source })?;
                Self::from_toml(&text)?
            }
            None => Config::default(),
        };
        if let Some(v) = env("OAC_LISTEN") {
            config.listen = v.parse().map_err(|e: std::net::AddrParseError| ConfigError::Value {
                key: "OAC_LISTEN",
                reason: e.to_string(),
            })?;
        }
        if let Some(v) = env("OAC_DATA_DIR") {
            config.data_dir = v.into();
        }
        if let Some(v) = env("OAC_BASE_URL") {
            config.base_url = Some(v);
        }
        if let Some(v) = env("OAC_VOCABULARY") {
            config.vocabulary = Some(v.into());
        }
        if let Some(v) = env("OAC_UI_DIR") {
            config.ui_dir = Some(v.into());
        }
        Ok(config)
    }

    /// Base URL without a trailing slash.
    pub fn base_url(&self) -> String {
        match &self.base_url {
            Some(b) => b.trim_end_matches('/').to_string(),
            None => format!("http://{}", self.listen),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn file_then_env() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("oac.toml");
        std::fs::write(&path, "listen = \"0.0.0.0:9000\"\ndata_dir = \"/var/oac\"\n").unwrap();
        let env: HashMap<&str, &str> = [("OAC_BASE_URL", "https://annotations.example.org/")].into();
        let c = Config::load_with(Some(&path), |k| env.get(k).map(|s| s.to_string())).unwrap();
        assert_eq!(c.listen, "0.0.0.0:9000".parse().unwrap());
        assert_eq!(c.data_dir, PathBuf::from("/var/oac"));
        assert_eq!(c.base_url(), "https://annotations.example.org");
    }

    #[test]
    fn defaults_and_errors() {
        let c = Config::load_with(None, |_| None).unwrap();
        assert_eq!(c.base_url(), "http://127.0.0.1:8080");
        assert!(Config::from_toml("colour = \"red\"").is_err());
        assert!(Config::load_with(None, |k| (k == "OAC_LISTEN").then(|| "nope".into())).is_err());
    }
}
