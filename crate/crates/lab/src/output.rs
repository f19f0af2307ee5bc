//! Artifacts, assertions and the run manifest.
//!
//! Artifacts are built in memory and written together with a manifest that
//! lists each file with its SHA-256 checksum. Artifact bytes depend only on the
//! configuration; timestamps live in the manifest alone.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::LabError;

/// Manifest file name inside the output directory.
pub const MANIFEST_NAME: &str = "manifest.json";

/// One output file.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    /// JSON document `{ "anchors": ..., "report": ... }`.
    pub fn json<T: Serialize>(name: &str, anchors: &[(&str, &str)], report: &T) -> Result<Self, LabError> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            anchors: BTreeMap<&'a str, &'a str>,
            report: &'a T,
        }
        let doc = Doc {
            anchors: anchors.iter().copied().collect(),
            report,
        };
        let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| LabError::io(name, e.into()))?;
        bytes.push(b'\n');
        Ok(Self {
            name: name.to_string(),
            bytes,
        })
    }

    /// CSV with the given header; each row's last column is its anchor.
    pub fn csv(name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<Self, LabError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| LabError::io(name, std::io::Error::other(e));
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| LabError::io(name, std::io::Error::other(e.to_string())))?;
        Ok(Self {
            name: name.to_string(),
            bytes,
        })
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

/// Float cell: shortest round-trip representation, empty for `None`.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// A named pass/fail check of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Record of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    /// Milliseconds since the Unix epoch.
    pub started_ms: u128,
    pub finished_ms: u128,
    pub status: Status,
    pub exit_code: i32,
    /// Diagnostic of the numerical error that aborted the run, verbatim.
    pub error: Option<String>,
    pub assertions: Vec<Assertion>,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// Write the artifacts, then the manifest listing them. Returns the manifest path.
pub fn write_outputs(dir: &Path, artifacts: &[Artifact], manifest: &RunManifest) -> Result<PathBuf, LabError> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(format!("creating {}", dir.display()), e))?;
    for a in artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.bytes).map_err(|e| LabError::io(format!("writing {}", path.display()), e))?;
    }
    let path = dir.join(MANIFEST_NAME);
    let mut bytes = serde_json::to_vec_pretty(manifest).map_err(|e| LabError::io(MANIFEST_NAME, e.into()))?;
    bytes.push(b'\n');
    std::fs::write(&path, bytes).map_err(|e| LabError::io(format!("writing {}", path.display()), e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_checksums() {
        let a = Artifact::csv("t.csv", &["x", "anchor"], &[vec!["1.5".into(), "a, b".into()]]).unwrap();
        assert_eq!(String::from_utf8(a.bytes.clone()).unwrap(), "x,anchor\n1.5,\"a, b\"\n");
        // sha256 of the empty string
        let e = Artifact {
            name: "e".into(),
            bytes: Vec::new(),
        };
        assert_eq!(
            e.sha256(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn json_wraps_report_with_anchors() {
        let a = Artifact::json("r.json", &[("x", "quantity")], &BTreeMap::from([("x", 1.0)])).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&a.bytes).unwrap();
        assert_eq!(v["anchors"]["x"], "quantity");
        assert_eq!(v["report"]["x"], 1.0);
    }

    #[test]
    fn cells() {
        assert_eq!(cell(Some(0.125)), "0.125");
        assert_eq!(cell(None), "");
    }
}
