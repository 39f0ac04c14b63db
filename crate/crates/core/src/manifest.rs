//! Reproducibility metadata written next to every CLI artifact.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL_NAME: &str = "divsim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, String>,
    /// Input role (e.g. `model`, `partition-0`) to SHA-256 hex digest.
    pub inputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            tool: TOOL_NAME.to_owned(),
            version: TOOL_VERSION.to_owned(),
            command: command.to_owned(),
            seed: None,
            parameters: BTreeMap::new(),
            inputs: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_owned(), value.to_string());
    }

    pub fn add_input_bytes(&mut self, role: &str, bytes: &[u8]) {
        self.inputs.insert(role.to_owned(), sha256_hex(bytes));
    }

    pub fn add_input_file(&mut self, role: &str, path: &Path) -> Result<()> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        self.add_input_bytes(role, &bytes);
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `<artifact>.manifest.json` beside `artifact`.
    pub fn write_sidecar(&self, artifact: &Path) -> Result<PathBuf> {
        let path = sidecar_path(artifact);
        fs::write(&path, self.to_json()?).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

pub fn sidecar_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
