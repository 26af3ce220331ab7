use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(name: &str, bytes: &[u8]) -> Self {
        FileDigest {
            name: name.to_string(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

/// Written next to every result set. `config` alone reruns the experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub threads: usize,
    pub started_unix: u64,
    pub duration_seconds: f64,
    pub files: Vec<FileDigest>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Names whose checksum differs from `other`, or that only one side has.
    pub fn mismatches(&self, other: &[FileDigest]) -> Vec<String> {
        let mut out: Vec<String> = self
            .files
            .iter()
            .filter(|f| !other.contains(f))
            .map(|f| f.name.clone())
            .collect();
        out.extend(
            other
                .iter()
                .filter(|f| !self.files.iter().any(|g| g.name == f.name))
                .map(|f| f.name.clone()),
        );
        out
    }
}
