//! CSV writing and run manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// 17 significant digits; empty cell for values that do not exist.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub threads: usize,
    pub input_hash: String,
    pub wall_time_s: f64,
    pub version: String,
    pub outputs: Vec<OutputRecord>,
}

/// Collects the outputs of one command and writes its manifest.
pub struct Run {
    dir: PathBuf,
    stem: String,
    command: String,
    config: serde_json::Value,
    seed: u64,
    threads: usize,
    started: Instant,
    outputs: Vec<OutputRecord>,
}

impl Run {
    pub fn new(dir: &Path, stem: &str, command: &str, config: serde_json::Value, seed: u64, threads: usize) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem: stem.to_string(),
            command: command.to_string(),
            config,
            seed,
            threads,
            started: Instant::now(),
            outputs: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(header).map_err(io)?;
        for row in rows {
            if row.len() != header.len() {
                return Err(CliError::Io(format!("{name}: row of {} cells under {} columns", row.len(), header.len())));
            }
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.file(name, &bytes, rows.len())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        self.file(name, &bytes, 0)
    }

    fn file(&mut self, name: &str, bytes: &[u8], rows: usize) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.outputs.push(OutputRecord { path: name.to_string(), sha256: sha256_hex(bytes), rows });
        Ok(path)
    }

    pub fn finish(self) -> Result<RunManifest, CliError> {
        let hashed = self.config.get("inputs").unwrap_or(&self.config);
        let input = serde_json::to_vec(&(&self.command, hashed, self.seed)).expect("json value");
        let manifest = RunManifest {
            command: self.command,
            config: self.config,
            seed: self.seed,
            threads: self.threads,
            input_hash: sha256_hex(&input),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.outputs,
        };
        let path = self.dir.join(format!("{}.manifest.json", self.stem));
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(manifest)
    }
}
