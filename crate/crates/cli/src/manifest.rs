//! `manifest.json`: config echo, timing, outcome and a checksum for every emitted file.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

pub const FILE_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the run directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub code_version: String,
    pub config: BTreeMap<String, String>,
    pub started_unix: f64,
    pub finished_unix: f64,
    /// `completed` or `failed`.
    pub status: String,
    pub error: Option<String>,
    pub summary: serde_json::Value,
    pub files: Vec<FileEntry>,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Every regular file below `dir` except the manifest, sorted by path.
pub fn collect_files(dir: &Path) -> std::io::Result<Vec<FileEntry>> {
    let mut out = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(std::io::Error::other)?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(dir)
            .expect("walk stays below its root")
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        if rel == FILE_NAME {
            continue;
        }
        let bytes = std::fs::read(entry.path())?;
        out.push(FileEntry {
            path: rel,
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
    }
    Ok(out)
}

impl RunManifest {
    pub fn new(scenario: &str, config: BTreeMap<String, String>, started_unix: f64) -> Self {
        Self {
            scenario: scenario.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            started_unix,
            finished_unix: started_unix,
            status: "completed".to_string(),
            error: None,
            summary: serde_json::Value::Null,
            files: Vec::new(),
        }
    }

    /// Checksums the run directory and writes `manifest.json` into it.
    pub fn finish(mut self, dir: &Path) -> std::io::Result<Self> {
        self.finished_unix = unix_now();
        self.files = collect_files(dir)?;
        let text = serde_json::to_string_pretty(&self).map_err(std::io::Error::other)?;
        std::fs::write(dir.join(FILE_NAME), text + "\n")?;
        Ok(self)
    }

    pub fn load(dir: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(dir.join(FILE_NAME))?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}

/// Paths whose checksum disagrees with the manifest, plus unlisted or missing files.
pub fn verify(dir: &Path) -> std::io::Result<Vec<String>> {
    let manifest = RunManifest::load(dir)?;
    let actual = collect_files(dir)?;
    let mut bad = Vec::new();
    for e in &actual {
        match manifest.files.iter().find(|m| m.path == e.path) {
            Some(m) if m == e => {}
            _ => bad.push(e.path.clone()),
        }
    }
    for m in &manifest.files {
        if !actual.iter().any(|e| e.path == m.path) {
            bad.push(m.path.clone());
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_cover_nested_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("snapshots")).unwrap();
        std::fs::write(dir.path().join("diag.csv"), "t\n0\n").unwrap();
        std::fs::write(dir.path().join("snapshots/t_000000.dmnls"), [1u8, 2, 3]).unwrap();
        let m = RunManifest::new("simulate", BTreeMap::new(), unix_now())
            .finish(dir.path())
            .unwrap();
        let paths: Vec<&str> = m.files.iter().map(|f| f.path.as_str()).collect();
        assert_eq!(paths, ["diag.csv", "snapshots/t_000000.dmnls"]);
        assert_eq!(m.files[0].sha256, sha256_hex(b"t\n0\n"));
        assert_eq!(m.files[1].bytes, 3);
        assert!(verify(dir.path()).unwrap().is_empty());
        std::fs::write(dir.path().join("diag.csv"), "t\n1\n").unwrap();
        assert_eq!(verify(dir.path()).unwrap(), ["diag.csv"]);
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
