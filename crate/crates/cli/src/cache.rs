use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crgjms::sphere::HarmonicBasis;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Bumped whenever the basis conventions change; older files are rebuilt.
pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    basis: HarmonicBasis,
}

pub struct BasisLoad {
    pub basis: HarmonicBasis,
    pub cache_hit: bool,
    pub build_seconds: f64,
    pub path: PathBuf,
}

pub fn cache_path(dir: &Path, n: usize, degree: u32) -> PathBuf {
    dir.join(format!("basis-v{CACHE_VERSION}-n{n}-N{degree}.json"))
}

pub fn load_or_build(dir: &Path, n: usize, degree: u32) -> Result<BasisLoad, CliError> {
    let path = cache_path(dir, n, degree);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(c) = serde_json::from_str::<CacheFile>(&text) {
            if c.version == CACHE_VERSION && c.basis.n == n && c.basis.degree == degree {
                let mut basis = c.basis;
                basis.refresh_float();
                return Ok(BasisLoad { basis, cache_hit: true, build_seconds: 0.0, path });
            }
        }
    }
    let t = Instant::now();
    let basis = HarmonicBasis::build(n, degree)?;
    let build_seconds = t.elapsed().as_secs_f64();
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create cache {}: {e}", dir.display())))?;
    let text = serde_json::to_string(&CacheFile { version: CACHE_VERSION, basis: basis.clone() })
        .map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(&path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(BasisLoad { basis, cache_hit: false, build_seconds, path })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_load_hits_and_stale_version_rebuilds() {
        let dir = tempfile::tempdir().unwrap();
        let a = load_or_build(dir.path(), 1, 3).unwrap();
        assert!(!a.cache_hit);
        let b = load_or_build(dir.path(), 1, 3).unwrap();
        assert!(b.cache_hit && b.build_seconds == 0.0);
        assert_eq!(a.basis.float_elements(), b.basis.float_elements());
        let text = fs::read_to_string(&a.path).unwrap().replacen("\"version\":1", "\"version\":0", 1);
        fs::write(&a.path, text).unwrap();
        assert!(!load_or_build(dir.path(), 1, 3).unwrap().cache_hit);
    }
}
