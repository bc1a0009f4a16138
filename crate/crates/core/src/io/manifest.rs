//! Run manifests: enough to rerun a CLI invocation exactly.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

/// Hex SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, Serialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

impl InputFile {
    pub fn hash(path: &Path) -> io::Result<Self> {
        Ok(InputFile {
            path: path.to_path_buf(),
            sha256: sha256_file(path)?,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub version: String,
    pub workers: usize,
    /// Mesh file, absent for generated meshes.
    pub mesh: Option<InputFile>,
    pub config: Option<InputFile>,
    /// Free-form settings that are not in any input file.
    pub settings: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str, workers: usize) -> Self {
        Manifest {
            command: command.into(),
            arguments: std::env::args().skip(1).collect(),
            version: env!("CARGO_PKG_VERSION").into(),
            workers,
            mesh: None,
            config: None,
            settings: BTreeMap::new(),
        }
    }

    pub fn setting(mut self, key: &str, value: impl ToString) -> Self {
        self.settings.insert(key.into(), value.to_string());
        self
    }

    /// Writes `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        std::fs::write(&path, json + "\n")?;
        Ok(path)
    }
}
