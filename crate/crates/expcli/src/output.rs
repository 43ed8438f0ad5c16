//! Output directory bookkeeping and CSV formatting.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Full-precision scientific notation used for every CSV number.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes files under one root and remembers them for the manifest.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> CliResult<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|source| CliError::Io { path: root.clone(), source })?;
        Ok(Self { root, written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.to_path_buf(), source })?;
        }
        std::fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(path)
    }

    /// Hashes every written file as it is on disk now.
    pub fn artifacts(&self) -> CliResult<Vec<Artifact>> {
        let mut names = self.written.clone();
        names.sort();
        names
            .into_iter()
            .map(|name| {
                let path = self.root.join(&name);
                let bytes = std::fs::read(&path).map_err(|source| CliError::Io { path, source })?;
                Ok(Artifact { path: name, sha256: sha256_hex(&bytes) })
            })
            .collect()
    }

    /// Writes `manifest.json` from `body` plus an `artifacts` list.
    pub fn write_manifest<M: Serialize>(&mut self, body: &M) -> CliResult<PathBuf> {
        let mut value = serde_json::to_value(body).map_err(|e| CliError::Config(e.to_string()))?;
        let artifacts = serde_json::to_value(self.artifacts()?).expect("artifact list serializes");
        if let serde_json::Value::Object(map) = &mut value {
            map.insert("artifacts".into(), artifacts);
        }
        let text = serde_json::to_string_pretty(&value).expect("manifest serializes");
        let path = self.root.join(MANIFEST_FILE);
        std::fs::write(&path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
        Ok(path)
    }
}

/// Checks every artifact listed in a manifest against the file on disk.
/// Returns the paths whose hash differs or which are missing.
pub fn verify_manifest(dir: &Path) -> CliResult<Vec<String>> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    let artifacts: Vec<Artifact> = serde_json::from_value(value["artifacts"].clone())
        .map_err(|e| CliError::Config(format!("manifest artifacts: {e}")))?;
    Ok(artifacts
        .into_iter()
        .filter(|a| std::fs::read(dir.join(&a.path)).map(|b| sha256_hex(&b) != a.sha256).unwrap_or(true))
        .map(|a| a.path)
        .collect())
}

/// `header` followed by one line per row.
pub fn csv<I: IntoIterator<Item = String>>(header: &str, rows: I) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{row}");
    }
    out
}
