use std::fs;
use std::path::{Path, PathBuf};

use fgf_core::Error;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Loaded;
use crate::failure::Failure;

/// A JSON artifact body tagged with the configuration hash and seed that
/// produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stamped<T> {
    pub config_hash: String,
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub body: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub stage_seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// Seed of one stage's random stream, derived from the pipeline seed.
pub fn stage_seed(seed: u64, stage: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stage.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

fn digest_file(path: &Path) -> Result<(String, u64), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::from(Error::io(path, e)))?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn manifest_path(out: &Path, stage: &str) -> PathBuf {
    out.join("manifests").join(format!("{stage}.json"))
}

/// Bookkeeping for one running stage: inputs read and outputs written, and
/// the manifest that records them.
pub struct Stage<'a> {
    pub name: &'static str,
    pub loaded: &'a Loaded,
    pub seed: Option<u64>,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl<'a> Stage<'a> {
    pub fn new(name: &'static str, loaded: &'a Loaded) -> Self {
        Self {
            name,
            loaded,
            seed: loaded.config.seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn stage_seed(&self) -> Option<u64> {
        self.seed.map(|s| stage_seed(s, self.name))
    }

    pub fn out(&self, rel: &str) -> PathBuf {
        self.loaded.out.join(rel)
    }

    fn record(list: &mut Vec<FileDigest>, loaded: &Loaded, path: &Path) -> Result<(), Failure> {
        let (sha256, bytes) = digest_file(path)?;
        let shown = loaded.display(path);
        list.retain(|d| d.path != shown);
        list.push(FileDigest {
            path: shown,
            sha256,
            bytes,
        });
        Ok(())
    }

    /// Hash a configured input file.
    pub fn input(&mut self, path: &Path) -> Result<PathBuf, Failure> {
        Self::record(&mut self.inputs, self.loaded, path)?;
        Ok(path.to_path_buf())
    }

    /// An artifact of an earlier stage, or a data error naming the command
    /// that produces it.
    pub fn require(&mut self, rel: &str, producer: &str) -> Result<PathBuf, Failure> {
        let path = self.out(rel);
        if !path.exists() {
            return Err(Error::MissingArtifact {
                path,
                hint: format!("run `fgf {producer}` first"),
            }
            .into());
        }
        self.input(&path)
    }

    pub fn read_json<T: DeserializeOwned>(
        &mut self,
        rel: &str,
        producer: &str,
    ) -> Result<T, Failure> {
        let path = self.require(rel, producer)?;
        let text = fs::read_to_string(&path).map_err(|e| Failure::from(Error::io(&path, e)))?;
        serde_json::from_str(&text).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
    }

    pub fn write_text(&mut self, rel: &str, text: &str) -> Result<PathBuf, Failure> {
        let path = self.out(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Failure::runtime(Error::io(dir, e).to_string()))?;
        }
        fs::write(&path, text).map_err(|e| Failure::runtime(Error::io(&path, e).to_string()))?;
        Self::record(&mut self.outputs, self.loaded, &path)?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, body: T) -> Result<PathBuf, Failure> {
        let stamped = Stamped {
            config_hash: self.loaded.hash.clone(),
            seed: self.seed,
            body,
        };
        let text = to_json(&stamped)?;
        self.write_text(rel, &text)
    }

    /// Record a file that a library call wrote directly.
    pub fn wrote(&mut self, path: &Path) -> Result<(), Failure> {
        Self::record(&mut self.outputs, self.loaded, path)
    }

    pub fn finish(self) -> Result<Manifest, Failure> {
        let manifest = Manifest {
            stage: self.name.to_string(),
            config_hash: self.loaded.hash.clone(),
            seed: self.seed,
            stage_seed: self.stage_seed(),
            inputs: self.inputs,
            outputs: self.outputs,
        };
        let path = manifest_path(&self.loaded.out, self.name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Failure::runtime(Error::io(dir, e).to_string()))?;
        }
        fs::write(&path, to_json(&manifest)?)
            .map_err(|e| Failure::runtime(Error::io(&path, e).to_string()))?;
        Ok(manifest)
    }
}
