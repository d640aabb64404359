//! Single-link configuration files.
//!
//! ```text
//! [radio]
//! tx_power_dbm = 30
//! g_over_t_dbi_per_k = 15.9
//! bandwidth_hz = 400 MHz
//! [link]
//! altitude_km = 600
//! elevation_deg = 30
//! scenario = rural
//! ```
//!
//! Sections are optional and limited to `radio`, `link`, `channel` and
//! `relay`. Keys are the parameter names of [`Param`]; any other key is
//! rejected.

use std::path::Path;

use super::kv;
use super::params::{resolve, LinkConfig, Param, ParamSet};
use crate::error::{Error, Result};

pub const CONFIG_SECTIONS: [&str; 4] = ["radio", "link", "channel", "relay"];

/// Parses a config file into raw parameters without applying defaults.
pub fn parse_config_params(text: &str) -> Result<ParamSet> {
    let mut params = ParamSet::new();
    for entry in kv::parse(text)? {
        if let Some(section) = &entry.section {
            if !CONFIG_SECTIONS.contains(&section.as_str()) {
                return Err(Error::Parse {
                    line: entry.line,
                    message: format!(
                        "unknown section `[{section}]` (valid: {})",
                        CONFIG_SECTIONS.join(", ")
                    ),
                });
            }
        }
        let param = Param::from_key(&entry.key).ok_or_else(|| Error::UnknownKey {
            line: entry.line,
            key: entry.key.clone(),
        })?;
        let value = param.parse_value(&entry.value).map_err(|e| Error::Parse {
            line: entry.line,
            message: e.to_string(),
        })?;
        if params.insert(param, value).is_some() {
            return Err(Error::Parse {
                line: entry.line,
                message: format!("duplicate key `{}`", entry.key),
            });
        }
    }
    Ok(params)
}

pub fn parse_config(text: &str) -> Result<LinkConfig> {
    resolve(&parse_config_params(text)?)
}

pub fn load_config_params(path: impl AsRef<Path>) -> Result<ParamSet> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_params(&text)
}

/// Reads and resolves a config file with defaults applied.
pub fn load_config(path: impl AsRef<Path>) -> Result<LinkConfig> {
    resolve(&load_config_params(path)?)
}
