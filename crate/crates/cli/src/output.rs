//! Artifact writing. Every file written in a run is recorded so a failed run
//! can remove what it produced.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub struct Outputs {
    dir: PathBuf,
    hash: String,
    seed: u64,
    created: Vec<String>,
    made_dir: bool,
}

#[derive(Debug, Serialize)]
pub struct ArtifactRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Outputs {
    pub fn new(dir: &Path, hash: String, seed: u64) -> Result<Self> {
        let made_dir = !dir.exists();
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            hash,
            seed,
            created: Vec::new(),
            made_dir,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// First line of every CSV artifact.
    pub fn stamp(&self) -> String {
        format!("# config_hash={} seed={}\n", self.hash, self.seed)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        if !self.created.iter().any(|c| c == name) {
            self.created.push(name.to_string());
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
    }

    /// Writes a CSV produced by `body` after the stamp line.
    pub fn csv(&mut self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> textcontrast::Result<()>) -> Result<()> {
        let mut buf = self.stamp().into_bytes();
        body(&mut buf)?;
        self.write_bytes(name, &buf)
    }

    /// Writes `{"config_hash", "seed", "result"}` as pretty JSON.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let wrapped = json!({
            "config_hash": self.hash,
            "seed": self.seed,
            "result": value,
        });
        self.raw_json(name, &wrapped)
    }

    pub fn raw_json(&mut self, name: &str, value: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn svg(&mut self, name: &str, svg: &str) -> Result<()> {
        let text = format!("<!-- config_hash={} seed={} -->\n{svg}", self.hash, self.seed);
        self.write_bytes(name, text.as_bytes())
    }

    /// Written artifacts in creation order, with sizes and digests.
    pub fn records(&self) -> Result<Vec<ArtifactRecord>> {
        self.created
            .iter()
            .map(|name| {
                let bytes = fs::read(self.dir.join(name))?;
                Ok(ArtifactRecord {
                    path: name.clone(),
                    bytes: bytes.len(),
                    sha256: sha256_hex(&bytes),
                })
            })
            .collect()
    }

    /// Removes every file this run wrote, and the directory if the run made it
    /// and it is now empty.
    pub fn cleanup(&self) {
        for name in &self.created {
            let _ = fs::remove_file(self.dir.join(name));
        }
        if self.made_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}
