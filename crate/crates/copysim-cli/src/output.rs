//! Deterministic file emission: CSV with full-precision floats, JSON
//! summaries, and content digests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::hex_string;

/// Full-precision float formatting: 17 significant digits, '.' decimal, no
/// separators, so every f64 round-trips losslessly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A cell of a CSV row.
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

fn render(cell: &Cell) -> String {
    match cell {
        Cell::Float(x) => format_float(*x),
        Cell::Int(x) => x.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

/// Collects output files for one run directory and digests them on write.
pub struct RunWriter {
    dir: PathBuf,
    outputs: Vec<(String, String)>,
}

impl RunWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// (file name, sha256) pairs written so far.
    pub fn outputs(&self) -> &[(String, String)] {
        &self.outputs
    }

    pub fn write_csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<Cell>>,
    ) -> Result<()> {
        let mut body = String::new();
        body.push_str(&header.join(","));
        body.push('\n');
        for row in rows {
            let line: Vec<String> = row.iter().map(render).collect();
            body.push_str(&line.join(","));
            body.push('\n');
        }
        self.write_bytes(name, body.as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        let mut file =
            fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        file.write_all(bytes)?;
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        self.outputs
            .push((name.to_string(), hex_string(&hasher.finalize())));
        Ok(())
    }
}
