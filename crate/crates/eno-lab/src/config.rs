//! Key=value experiment files: one assignment per line, `#` comments,
//! unknown keys rejected with their line number.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Keys a spec file may assign; mirrors the command-line flags.
pub const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "k",
    "n",
    "eps",
    "seed",
    "trials",
    "out",
    "flux",
    "integrator",
    "cfl",
    "t_end",
    "property",
    "func",
];

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parses `key=value` lines into a map. Unknown keys, duplicates, empty
/// values, and non-numeric values for numeric keys are rejected with the
/// offending line number; values are kept as raw strings for the caller to
/// convert.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(ConfigError {
                line,
                message: format!("expected key=value, got {stripped:?}"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError {
                line,
                message: format!("unknown key {key:?}"),
            });
        }
        if value.is_empty() {
            return Err(ConfigError {
                line,
                message: format!("empty value for {key:?}"),
            });
        }
        let type_ok = match key {
            "k" | "n" | "seed" | "trials" => value.parse::<u64>().is_ok(),
            "eps" | "cfl" | "t_end" => value.parse::<f64>().is_ok(),
            _ => true,
        };
        if !type_ok {
            return Err(ConfigError {
                line,
                message: format!("value {value:?} for {key:?} is not a number"),
            });
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(ConfigError {
                line,
                message: format!("duplicate key {key:?}"),
            });
        }
    }
    Ok(map)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}
