use std::io::Read;
use std::path::Path;

use anyhow::{Context, Result};
use plagscan::config::Config;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Written next to every detections file so a run can be repeated.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub command: &'static str,
    pub config: Config,
    pub resources_id: String,
    pub index_dir: String,
    pub index_digest: String,
    pub inputs: Vec<String>,
    pub detections: usize,
    pub started_at: String,
    pub finished_at: String,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// sha256 over the regular files of `dir` in name order. Each file
/// contributes its name, a NUL byte, its length as u64 LE and its bytes.
pub fn dir_digest(dir: &Path) -> Result<String> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut h = Sha256::new();
    let mut buf = Vec::new();
    for f in files {
        buf.clear();
        std::fs::File::open(&f)
            .and_then(|mut r| r.read_to_end(&mut buf))
            .with_context(|| format!("cannot read {}", f.display()))?;
        h.update(f.file_name().unwrap_or_default().to_string_lossy().as_bytes());
        h.update([0u8]);
        h.update((buf.len() as u64).to_le_bytes());
        h.update(&buf);
    }
    Ok(hex::encode(h.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_tracks_content_and_names() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a"), "one").unwrap();
        std::fs::write(dir.path().join("b"), "two").unwrap();
        let d1 = dir_digest(dir.path()).unwrap();
        assert_eq!(d1, dir_digest(dir.path()).unwrap());
        assert_eq!(d1.len(), 64);
        std::fs::write(dir.path().join("b"), "twO").unwrap();
        let d2 = dir_digest(dir.path()).unwrap();
        assert_ne!(d1, d2);
        std::fs::rename(dir.path().join("b"), dir.path().join("c")).unwrap();
        assert_ne!(d2, dir_digest(dir.path()).unwrap());
    }
}
