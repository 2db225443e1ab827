use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const LOCK_FILE: &str = ".imethod.lock";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_echo: String,
    pub source_revision: String,
    pub seeds: Vec<u64>,
    pub parallel: bool,
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputEntry>,
    pub measured: serde_json::Value,
}

/// Output directory held exclusively for one run through a lock file.
///
/// Files are buffered and written by [`OutputDir::commit`], the manifest
/// last; dropping without committing removes only the lock.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<(String, Vec<u8>)>,
    _lock: Lock,
}

struct Lock(PathBuf);

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

impl OutputDir {
    pub fn acquire(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        let lock = root.join(LOCK_FILE);
        let mut f = OpenOptions::new().write(true).create_new(true).open(&lock).map_err(|e| {
            if e.kind() == io::ErrorKind::AlreadyExists {
                io::Error::new(e.kind(), format!("{} is locked by another run", root.display()))
            } else {
                e
            }
        })?;
        writeln!(f, "{}", std::process::id())?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
            _lock: Lock(lock),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.into(), bytes.into()));
    }

    /// Writes every buffered file, then the manifest built from their
    /// checksums.
    pub fn commit(self, build: impl FnOnce(Vec<OutputEntry>) -> Manifest) -> io::Result<Manifest> {
        let stale = self.root.join(MANIFEST_FILE);
        if stale.exists() {
            fs::remove_file(&stale)?;
        }
        let mut entries = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let path = self.root.join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            let mut f = File::create(&path)?;
            f.write_all(bytes)?;
            f.sync_all()?;
            entries.push(OutputEntry {
                file: name.clone(),
                bytes: bytes.len() as u64,
                sha256: sha256_hex(bytes),
            });
        }
        let manifest = build(entries);
        let mut text = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
        text.push('\n');
        let tmp = self.root.join(".manifest.json.tmp");
        fs::write(&tmp, &text)?;
        fs::rename(&tmp, &stale)?;
        Ok(manifest)
    }
}
