use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const ENV_PREFIX: &str = "QL_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

impl InputRecord {
    pub fn read(path: &Path) -> Result<(String, InputRecord)> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        let record = InputRecord { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) };
        let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
        Ok((text, record))
    }
}

/// Everything needed to repeat a run: the argument vector, the `QL_*`
/// environment it saw, the resolved parameters and a hash of the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub argv: Vec<String>,
    pub env: BTreeMap<String, String>,
    pub parameters: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputRecord>,
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, Value>,
    pub status: String,
    pub exit_code: u8,
}

pub fn captured_env() -> BTreeMap<String, String> {
    std::env::vars().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect()
}
