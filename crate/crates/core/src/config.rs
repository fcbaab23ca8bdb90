//! Environment configuration documents.
//!
//! A config is a TOML (or JSON) document with a `domain` tag, an optional
//! `schema_version` (currently 1) and the domain's fields at top level.
//! Missing domain fields take their defaults. The canonical form is compact
//! JSON with sorted keys; its SHA-256 is the config digest.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cyber::CyberConfig;
use crate::rideshare::RideshareConfig;
use crate::wildfire::WildfireConfig;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Wildfire,
    Cybersecurity,
    Rideshare,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Wildfire, Domain::Cybersecurity, Domain::Rideshare];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Wildfire => "wildfire",
            Domain::Cybersecurity => "cybersecurity",
            Domain::Rideshare => "rideshare",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wildfire" => Ok(Domain::Wildfire),
            "cybersecurity" | "cyber" => Ok(Domain::Cybersecurity),
            "rideshare" => Ok(Domain::Rideshare),
            other => Err(ConfigError::UnknownDomain(other.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("missing `domain` tag")]
    MissingDomain,
    #[error("unsupported schema_version {0}")]
    Schema(u64),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Field path of a validation failure, if any.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
            _ => None,
        }
    }
}

pub(crate) fn check_probability(field: &str, p: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ConfigError::invalid(field, format!("{p} is not a probability in [0, 1]")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EnvConfig {
    Wildfire(WildfireConfig),
    Cybersecurity(CyberConfig),
    Rideshare(RideshareConfig),
}

impl EnvConfig {
    pub fn domain(&self) -> Domain {
        match self {
            EnvConfig::Wildfire(_) => Domain::Wildfire,
            EnvConfig::Cybersecurity(_) => Domain::Cybersecurity,
            EnvConfig::Rideshare(_) => Domain::Rideshare,
        }
    }

    pub fn default_for(domain: Domain) -> Self {
        match domain {
            Domain::Wildfire => EnvConfig::Wildfire(WildfireConfig::default()),
            Domain::Cybersecurity => EnvConfig::Cybersecurity(CyberConfig::default()),
            Domain::Rideshare => EnvConfig::Rideshare(RideshareConfig::default()),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            EnvConfig::Wildfire(c) => c.validate(),
            EnvConfig::Cybersecurity(c) => c.validate(),
            EnvConfig::Rideshare(c) => c.validate(),
        }
    }

    pub fn max_steps(&self) -> usize {
        match self {
            EnvConfig::Wildfire(c) => c.max_steps,
            EnvConfig::Cybersecurity(c) => c.max_steps,
            EnvConfig::Rideshare(c) => c.max_steps,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let body = match self {
            EnvConfig::Wildfire(c) => serde_json::to_value(c),
            EnvConfig::Cybersecurity(c) => serde_json::to_value(c),
            EnvConfig::Rideshare(c) => serde_json::to_value(c),
        }
        .expect("config bodies serialize");
        let mut map = match body {
            serde_json::Value::Object(m) => m,
            _ => unreachable!("config bodies are structs"),
        };
        map.insert("domain".into(), self.domain().as_str().into());
        map.insert("schema_version".into(), SCHEMA_VERSION.into());
        serde_json::Value::Object(map)
    }

    /// Compact JSON with sorted keys.
    pub fn canonical_text(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Hex SHA-256 of the canonical text.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self, ConfigError> {
        let mut map = match value {
            serde_json::Value::Object(m) => m,
            _ => return Err(ConfigError::Parse("config must be a table".into())),
        };
        let domain = match map.remove("domain") {
            Some(serde_json::Value::String(s)) => s.parse::<Domain>()?,
            Some(_) => return Err(ConfigError::invalid("domain", "must be a string")),
            None => return Err(ConfigError::MissingDomain),
        };
        match map.remove("schema_version") {
            None => {}
            Some(v) => match v.as_u64() {
                Some(SCHEMA_VERSION) => {}
                Some(other) => return Err(ConfigError::Schema(other)),
                None => return Err(ConfigError::invalid("schema_version", "must be an integer")),
            },
        }
        let body = serde_json::Value::Object(map);
        let parse_err = |e: serde_json::Error| ConfigError::Parse(e.to_string());
        let config = match domain {
            Domain::Wildfire => EnvConfig::Wildfire(serde_json::from_value(body).map_err(parse_err)?),
            Domain::Cybersecurity => {
                EnvConfig::Cybersecurity(serde_json::from_value(body).map_err(parse_err)?)
            }
            Domain::Rideshare => EnvConfig::Rideshare(serde_json::from_value(body).map_err(parse_err)?),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let value = serde_json::to_value(table).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::from_json_value(value)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let value = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::from_json_value(value)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_json_value()).expect("config renders as TOML")
    }
}

/// Reads and validates a config file; `.json` files are parsed as JSON,
/// anything else as TOML.
pub fn parse_config(path: impl AsRef<Path>) -> Result<EnvConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        EnvConfig::from_json_str(&text)
    } else {
        EnvConfig::from_toml_str(&text)
    }
}

impl Serialize for EnvConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EnvConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        EnvConfig::from_json_value(value).map_err(serde::de::Error::custom)
    }
}

/// Configs shipped with the crate, as `(domain, name, toml text)`.
pub fn shipped_configs() -> Vec<(Domain, &'static str, &'static str)> {
    vec![
        (Domain::Wildfire, "default", include_str!("wildfire/configs/default.toml")),
        (Domain::Wildfire, "ws1", include_str!("wildfire/configs/ws1.toml")),
        (Domain::Wildfire, "ws2", include_str!("wildfire/configs/ws2.toml")),
        (Domain::Wildfire, "ws3", include_str!("wildfire/configs/ws3.toml")),
        (Domain::Cybersecurity, "default", include_str!("cyber/configs/default.toml")),
        (Domain::Cybersecurity, "cs1", include_str!("cyber/configs/cs1.toml")),
        (Domain::Cybersecurity, "cs2", include_str!("cyber/configs/cs2.toml")),
        (Domain::Cybersecurity, "cs3", include_str!("cyber/configs/cs3.toml")),
        (Domain::Rideshare, "default", include_str!("rideshare/configs/default.toml")),
        (Domain::Rideshare, "low_arrival", include_str!("rideshare/configs/low_arrival.toml")),
        (Domain::Rideshare, "high_arrival", include_str!("rideshare/configs/high_arrival.toml")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_formatting_and_key_order() {
        let a = "domain = \"rideshare\"\np_arrival = 0.3\nmax_steps = 50\n";
        let b = "max_steps    = 50\n\n# comment\np_arrival=0.3\ndomain=\"rideshare\"\nschema_version = 1\n";
        let a = EnvConfig::from_toml_str(a).unwrap();
        let b = EnvConfig::from_toml_str(b).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn digest_tracks_semantic_changes() {
        let a = EnvConfig::from_toml_str("domain = \"rideshare\"\np_arrival = 0.3\n").unwrap();
        let b = EnvConfig::from_toml_str("domain = \"rideshare\"\np_arrival = 0.4\n").unwrap();
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn unknown_domain_is_rejected() {
        let err = EnvConfig::from_toml_str("domain = \"chess\"\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownDomain("chess".into()));
        assert_eq!(EnvConfig::from_toml_str("x = 1\n").unwrap_err(), ConfigError::MissingDomain);
    }

    #[test]
    fn out_of_range_probability_names_field() {
        let err = EnvConfig::from_toml_str("domain = \"wildfire\"\np_spread = 1.5\n").unwrap_err();
        assert_eq!(err.field(), Some("p_spread"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = EnvConfig::from_toml_str("domain = \"wildfire\"\nwind = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)), "{err:?}");
    }

    #[test]
    fn schema_version_must_match() {
        let err = EnvConfig::from_toml_str("domain = \"wildfire\"\nschema_version = 9\n").unwrap_err();
        assert_eq!(err, ConfigError::Schema(9));
    }

    #[test]
    fn canonical_round_trip_through_toml_and_json() {
        for domain in Domain::ALL {
            let cfg = EnvConfig::default_for(domain);
            let via_toml = EnvConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
            let via_json = EnvConfig::from_json_str(&cfg.canonical_text()).unwrap();
            assert_eq!(via_toml.digest(), cfg.digest());
            assert_eq!(via_json, cfg);
        }
    }

    #[test]
    fn shipped_configs_parse_and_default_files_match_code_defaults() {
        for (domain, name, text) in shipped_configs() {
            let cfg = EnvConfig::from_toml_str(text).unwrap_or_else(|e| panic!("{domain}/{name}: {e}"));
            assert_eq!(cfg.domain(), domain);
            if name == "default" {
                assert_eq!(cfg, EnvConfig::default_for(domain), "{domain}/default.toml drifted");
            }
        }
    }
}
