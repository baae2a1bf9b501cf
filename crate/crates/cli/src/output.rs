use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Context {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Context {
    pub fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| Failure::usage(format!("cannot write output: {e}")))
            }
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn budget(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<qpv_core::Error> for Failure {
    fn from(e: qpv_core::Error) -> Self {
        match e {
            qpv_core::Error::BudgetExceeded(_) | qpv_core::Error::TooManyQubits { .. } => Failure::budget(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

/// Identifies how an output was produced. Contains nothing time- or
/// host-dependent, so equal inputs give byte-identical outputs.
#[derive(Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config_sha256: String,
}

impl Provenance {
    pub fn new(command: &'static str, seed: u64, config: &[u8]) -> Self {
        Self {
            tool: "qpv",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config_sha256: hex::encode(Sha256::digest(config)),
        }
    }
}

pub fn read_config(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_config<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, Failure> {
    serde_json::from_slice(bytes).map_err(|e| Failure::usage(format!("invalid config: {e}")))
}

pub fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

pub fn csv_text<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::usage(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
