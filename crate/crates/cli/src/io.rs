//! File plumbing shared by all subcommands: hashed inputs, atomic output
//! writes, and the run manifest that makes every invocation replayable.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use curveres::matcore::Matrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Matrix output encoding selected by `--format`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Record of one command run: enough to reproduce the outputs exactly.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Program arguments (without the binary name); replaying them
    /// regenerates every listed output byte for byte.
    pub argv: Vec<String>,
    /// SHA-256 of each input file consumed.
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub version: String,
    pub outputs: Vec<String>,
}

/// Collects inputs and outputs of the running command and writes the
/// manifest at the end.
pub struct Workspace {
    out_dir: PathBuf,
    format: Format,
    seed: u64,
    manifest_path: Option<PathBuf>,
    inputs: BTreeMap<String, String>,
    outputs: Vec<String>,
}

impl Workspace {
    pub fn new(
        out_dir: &Path,
        format: Format,
        seed: u64,
        manifest_path: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir)
            .map_err(|e| CliError::usage(format!("cannot create {}: {e}", out_dir.display())))?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            format,
            seed,
            manifest_path,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Read a text input and record its hash.
    pub fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        let digest = Sha256::digest(text.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.insert(path.display().to_string(), hex);
        Ok(text)
    }

    /// Read a CSV matrix input (hash recorded), detecting a header row by
    /// whether the first line parses as numbers.
    pub fn read_matrix(&mut self, path: &Path) -> Result<(Matrix, Option<Vec<String>>), CliError> {
        let text = self.read_input(path)?;
        let has_header = text
            .lines()
            .next()
            .map(|l| l.split(',').any(|f| f.trim().parse::<f64>().is_err()))
            .unwrap_or(false);
        Matrix::from_csv_str(&text, has_header)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    fn write_atomic(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        let tmp = self.out_dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, bytes)
            .and_then(|()| fs::rename(&tmp, &path))
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    /// Write a matrix in the selected format; `base` is the file stem.
    pub fn write_matrix(
        &mut self,
        base: &str,
        m: &Matrix,
        header: Option<&[String]>,
    ) -> Result<PathBuf, CliError> {
        match self.format {
            Format::Csv => {
                let text = m.to_csv_string(header).map_err(CliError::numerical_from)?;
                self.write_atomic(&format!("{base}.csv"), text.as_bytes())
            }
            Format::Json => {
                let body = serde_json::json!({ "header": header, "matrix": m });
                let text = serde_json::to_string_pretty(&body).expect("serializable");
                self.write_atomic(&format!("{base}.json"), text.as_bytes())
            }
        }
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write_atomic(name, text.as_bytes())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        self.write_atomic(name, text.as_bytes())
    }

    /// Emit the manifest; call once, after all outputs are written.
    pub fn finish(mut self, command: &str, argv: &[String]) -> Result<(), CliError> {
        let manifest = RunManifest {
            command: command.to_string(),
            argv: argv.to_vec(),
            inputs: std::mem::take(&mut self.inputs),
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.outputs.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
        text.push('\n');
        match &self.manifest_path.clone() {
            Some(path) => {
                fs::write(path, text).map_err(|e| {
                    CliError::usage(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            None => {
                self.write_atomic("manifest.json", text.as_bytes())?;
            }
        }
        Ok(())
    }
}
