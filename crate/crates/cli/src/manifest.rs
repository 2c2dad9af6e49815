//! Run manifests and the output directory they describe.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::format::{sha256_hex, to_json, write_atomic};

pub const ARTIFACT: &str = "toda";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    /// Some stage failed; the files listed are what was produced before.
    Partial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub status: RunStatus,
    pub exit_code: i32,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
    pub files: Vec<FileEntry>,
    /// Wall-clock seconds per stage; only present when requested, since it
    /// would break byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl RunManifest {
    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path)?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn file(&self, path: &str) -> Option<&FileEntry> {
        self.files.iter().find(|f| f.path == path)
    }

    /// Recomputes every checksum against the files under `dir`.
    pub fn verify(&self, dir: &Path) -> CliResult<()> {
        for f in &self.files {
            let bytes = std::fs::read(dir.join(&f.path))?;
            if sha256_hex(&bytes) != f.sha256 {
                return Err(CliError::Config(format!("checksum mismatch for {}", f.path)));
            }
        }
        Ok(())
    }
}

/// Collects files written into one output directory.
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputSet {
    pub fn new(dir: PathBuf) -> CliResult<Self> {
        std::fs::create_dir_all(&dir)?;
        Ok(OutputSet { dir, files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> CliResult<()> {
        write_atomic(&self.dir.join(rel), bytes)?;
        self.files.retain(|f| f.path != rel);
        self.files.push(FileEntry {
            path: rel.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, rel: &str, value: &T) -> CliResult<()> {
        self.write(rel, &to_json(value)?)
    }

    /// Writes the manifest last; it does not list itself.
    pub fn finish(self, mut manifest: RunManifest) -> CliResult<RunManifest> {
        manifest.files = self.files;
        write_atomic(&self.dir.join(MANIFEST_NAME), &to_json(&manifest)?)?;
        Ok(manifest)
    }
}
