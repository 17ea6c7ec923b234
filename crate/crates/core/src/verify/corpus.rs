//! Append-only JSON-lines corpus of failures and discrepancies.

use std::fs::OpenOptions;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::json::GroupSpecJson;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub campaign: String,
    pub instance: usize,
    /// Seed the instance was generated from.
    pub seed: u64,
    /// `failure`, `discrepancy` or `alarm`.
    pub kind: String,
    pub check: String,
    pub detail: String,
    pub spec: GroupSpecJson,
    pub datum: Value,
    pub verdicts: Value,
}

pub fn append(path: &Path, records: &[Record]) -> io::Result<()> {
    if records.is_empty() {
        return Ok(());
    }
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut buf = String::new();
    for r in records {
        buf.push_str(&serde_json::to_string(r).map_err(io::Error::other)?);
        buf.push('\n');
    }
    file.write_all(buf.as_bytes())
}

pub fn read(path: &Path) -> io::Result<Vec<Record>> {
    let file = std::fs::File::open(path)?;
    BufReader::new(file)
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| serde_json::from_str(&l?).map_err(io::Error::other))
        .collect()
}
