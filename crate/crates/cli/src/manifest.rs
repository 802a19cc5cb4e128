use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

pub fn hash_input(path: &Path) -> Result<FileHash, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(FileHash { path: path.display().to_string(), sha256: sha256_hex(&bytes), bytes: bytes.len() as u64 })
}

pub fn read_manifest(out_dir: &Path) -> Result<RunManifest, CliError> {
    let p = out_dir.join(MANIFEST_NAME);
    let text = fs::read_to_string(&p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("malformed manifest {}: {e}", p.display())))
}

/// Differences between a stored manifest and freshly computed outputs.
pub fn compare(stored: &RunManifest, fresh: &[FileHash], out_dir: &Path) -> Vec<String> {
    let mut problems = Vec::new();
    for f in fresh {
        match stored.outputs.iter().find(|s| s.path == f.path) {
            None => problems.push(format!("{}: not listed in the manifest", f.path)),
            Some(s) if s.sha256 != f.sha256 => problems.push(format!("{}: recomputed hash differs", f.path)),
            Some(_) => {}
        }
    }
    for s in &stored.outputs {
        if !fresh.iter().any(|f| f.path == s.path) {
            problems.push(format!("{}: listed but not produced", s.path));
        }
        match fs::read(out_dir.join(&s.path)) {
            Ok(b) if sha256_hex(&b) == s.sha256 => {}
            Ok(_) => problems.push(format!("{}: file on disk differs from the manifest", s.path)),
            Err(_) => problems.push(format!("{}: missing on disk", s.path)),
        }
    }
    for i in &stored.inputs {
        match fs::read(&i.path) {
            Ok(b) if sha256_hex(&b) == i.sha256 => {}
            _ => problems.push(format!("input {}: changed or missing", i.path)),
        }
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
