//! CSV tables and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            // 17 significant digits round-trip every f64
            Cell::Float(v) if v.is_finite() => write!(out, "{v:.16e}").unwrap(),
            Cell::Float(v) => write!(out, "{v}").unwrap(),
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Text(s) => out.push_str(s),
            Cell::Empty => {}
        }
    }
}

/// A CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Write `table` as `<dir>/<name>.csv` and return the file entry.
pub fn write_table(table: &Table, dir: &Path) -> Result<FileEntry> {
    let file = format!("{}.csv", table.name);
    let path = dir.join(&file);
    let text = table.to_csv();
    std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
    Ok(FileEntry {
        file,
        sha256: sha256_hex(text.as_bytes()),
        rows: table.rows.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub file: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub config: BTreeMap<String, String>,
    pub version: String,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<CheckResult>,
    pub files: Vec<FileEntry>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new("x", &["tau", "d", "note"]);
        t.push(vec![0.1.into(), Cell::Empty, "a".into()]);
        t.push(vec![1.0.into(), 3usize.into(), "b".into()]);
        assert_eq!(
            t.to_csv(),
            "tau,d,note\n1.0000000000000001e-1,,a\n1.0000000000000000e0,3,b\n"
        );
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
