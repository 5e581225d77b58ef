use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Environment variables that override the file.
pub const ENV_BIND: &str = "FPR_BIND";
pub const ENV_PORT: &str = "FPR_PORT";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("{name} = '{value}' is not valid: {reason}")]
    Invalid {
        name: &'static str,
        value: String,
        reason: String,
    },
}

/// TOML service configuration. Every key is optional:
///
/// ```toml
/// bind = "127.0.0.1"
/// port = 8080
/// max_sim_replicates = 2000000
/// cors_origin = "http://localhost:5173"
/// static_dir = "webui/dist"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServiceConfig {
    pub bind: IpAddr,
    pub port: u16,
    /// Largest `n_sims` a simulate request may ask for.
    pub max_sim_replicates: u64,
    /// Origin allowed by CORS; any origin when unset.
    pub cors_origin: Option<String>,
    /// Directory served at `/` for the web UI.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: IpAddr::from([127, 0, 0, 1]),
            port: 8080,
            max_sim_replicates: 2_000_000,
            cors_origin: None,
            static_dir: None,
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    /// Applies `FPR_BIND` / `FPR_PORT` from `lookup` (normally
    /// `std::env::var`).
    pub fn apply_env(
        mut self,
        lookup: impl Fn(&str) -> Option<String>,
    ) -> Result<Self, ConfigError> {
        if let Some(v) = lookup(ENV_BIND) {
            self.bind = v.parse().map_err(|e: std::net::AddrParseError| ConfigError::Invalid {
                name: ENV_BIND,
                value: v.clone(),
                reason: e.to_string(),
            })?;
        }
        if let Some(v) = lookup(ENV_PORT) {
            self.port = v.parse().map_err(|e: std::num::ParseIntError| ConfigError::Invalid {
                name: ENV_PORT,
                value: v.clone(),
                reason: e.to_string(),
            })?;
        }
        Ok(self)
    }

    pub fn addr(&self) -> SocketAddr {
        SocketAddr::new(self.bind, self.port)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = ServiceConfig::from_toml("port = 9000\n", Path::new("x.toml")).unwrap();
        assert_eq!(cfg.port, 9000);
        assert_eq!(cfg.max_sim_replicates, 2_000_000);
        let cfg = cfg
            .apply_env(|k| (k == ENV_PORT).then(|| "9100".to_string()))
            .unwrap();
        assert_eq!(cfg.addr().to_string(), "127.0.0.1:9100");
        assert!(ServiceConfig::default()
            .apply_env(|_| Some("nope".into()))
            .is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ServiceConfig::from_toml("prot = 1\n", Path::new("x.toml")).unwrap_err();
        assert!(err.to_string().contains("prot"), "{err}");
    }
}
