//! Reproducibility manifests.
//!
//! Every CLI output directory gets exactly one `manifest.json` recording the
//! command line, root seed, full parameter set, input/output digests, build
//! version, and wall-clock duration. Re-running the recorded `argv` against
//! inputs with matching digests reproduces each output byte for byte on the
//! same build (the duration and the manifest itself naturally differ).

use crate::error::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let data = std::fs::read(path)?;
        Ok(FileDigest {
            path: path.display().to_string(),
            bytes: data.len() as u64,
            sha256: sha256_hex(&data),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub version: String,
    pub seed: u64,
    pub params: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub duration_ms: u64,
    #[serde(skip)]
    started: Instant,
}

impl RunManifest {
    pub fn begin(
        command: impl Into<String>,
        argv: Vec<String>,
        seed: u64,
        params: serde_json::Value,
    ) -> Self {
        RunManifest {
            command: command.into(),
            argv,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            params,
            inputs: Vec::new(),
            outputs: Vec::new(),
            duration_ms: 0,
            started: Instant::now(),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(FileDigest::of(path)?);
        Ok(())
    }

    /// Digest an output file after it has been fully written.
    pub fn record_output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(FileDigest::of(path)?);
        Ok(())
    }

    /// Finalizes the duration and writes `manifest.json` under `dir`.
    pub fn write(mut self, dir: &Path) -> Result<PathBuf> {
        self.duration_ms = self.started.elapsed().as_millis() as u64;
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&self)
            .expect("manifest serialization cannot fail");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}
