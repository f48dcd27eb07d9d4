use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    NotConverged,
    Error,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: String,
    pub k: Option<u32>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exit_code: u8,
    pub files: Vec<String>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub conventions: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub command: String,
    pub records: Vec<TaskRecord>,
    /// Every file written under the output directory, in write order.
    pub outputs: Vec<String>,
    pub complete: bool,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "qel".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            conventions: qel_core::CONVENTIONS.into(),
            config_hash: config_hash(config),
            config: config.clone(),
            command: command.into(),
            records: Vec::new(),
            outputs: Vec::new(),
            complete: false,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Worst exit code over the records.
    pub fn exit_code(&self) -> u8 {
        let codes: Vec<u8> = self.records.iter().map(|r| r.exit_code).collect();
        [3, 2, 1].into_iter().find(|c| codes.contains(c)).unwrap_or(0)
    }
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serialises");
    hex::encode(Sha256::digest(&bytes))
}

/// `#` lines opening every CSV.
pub fn csv_header(config_hash: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# qel {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# conventions: {}", qel_core::CONVENTIONS);
    let _ = writeln!(s, "# config_hash: {config_hash}");
    s
}

/// Output directory that remembers what it wrote.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    /// Clears files of a previous run recorded in its manifest and refuses
    /// directories holding anything else.
    pub fn prepare(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)?;
        let old = root.join(MANIFEST);
        if old.exists() {
            if let Ok(m) = RunManifest::load(&old) {
                for f in &m.outputs {
                    let p = root.join(f);
                    if p.is_file() {
                        std::fs::remove_file(p)?;
                    }
                }
            }
            std::fs::remove_file(&old)?;
            remove_empty_dirs(root)?;
        }
        if std::fs::read_dir(root)?.next().is_some() {
            return Err(CliError::Config(format!("output directory {} is not empty", root.display())));
        }
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, rel: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, contents)?;
        self.written.push(rel.to_string());
        Ok(())
    }

    pub fn finish(&mut self, mut manifest: RunManifest) -> Result<RunManifest, CliError> {
        manifest.outputs = self.written.clone();
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(self.root.join(MANIFEST), text)?;
        Ok(manifest)
    }
}

fn remove_empty_dirs(dir: &Path) -> std::io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path();
        if p.is_dir() {
            remove_empty_dirs(&p)?;
            if std::fs::read_dir(&p)?.next().is_none() {
                std::fs::remove_dir(&p)?;
            }
        }
    }
    Ok(())
}
