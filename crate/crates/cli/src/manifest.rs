use std::fs;
use std::path::{Path, PathBuf};

use mubforge::entropy::ENTROPY_TOL;
use mubforge::records::{to_json, SCHEMA_VERSION};
use mubforge::states::{ALGEBRAIC_TOL, CROSS_PATH_TOL, PROJECTOR_TOL};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

impl FileHash {
    pub fn of_bytes(path: &Path, bytes: &[u8]) -> Self {
        FileHash { path: path.display().to_string(), sha256: sha256_hex(bytes) }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub algebraic: f64,
    pub projector: f64,
    pub cross_path: f64,
    pub entropy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: ALGEBRAIC_TOL,
            projector: PROJECTOR_TOL,
            cross_path: CROSS_PATH_TOL,
            entropy: ENTROPY_TOL,
        }
    }
}

/// Everything needed to reproduce one run. Apart from `wall_time_seconds`,
/// identical invocations give identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub command: String,
    pub args: Vec<String>,
    pub p: Option<u32>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub guard_max_p: u32,
    pub tolerances: Tolerances,
    pub tool_version: String,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, args: &[String], guard_max_p: u32) -> Self {
        RunManifest {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            args: args.to_vec(),
            p: None,
            seed: None,
            budget: None,
            guard_max_p,
            tolerances: Tolerances::default(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_time_seconds: 0.0,
        }
    }
}

/// Manifest path for a single output file: `<out>.manifest.json`.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<FileHash, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(FileHash::of_bytes(path, text.as_bytes()))
}

pub(crate) fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    write_file(path, &to_json(manifest)).map(|_| ())
}
