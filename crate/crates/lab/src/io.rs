use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::LabError;

/// Rows destined for one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &'static str, header: &[&'static str]) -> Self {
        Table {
            file,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip representation, so output is reproducible bit for bit.
pub fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{v:e}")
    }
}

pub fn write_csv(dir: &Path, table: &Table) -> Result<PathBuf, LabError> {
    let path = dir.join(table.file);
    let mut w = csv::Writer::from_path(&path).map_err(|e| LabError::Csv { path: path.clone(), source: e })?;
    w.write_record(&table.header).map_err(|e| LabError::Csv { path: path.clone(), source: e })?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| LabError::Csv { path: path.clone(), source: e })?;
    }
    w.flush().map_err(|e| LabError::Io { path: path.clone(), source: e })?;
    Ok(path)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), LabError> {
    let mut text = serde_json::to_string_pretty(value).map_err(LabError::Json)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| LabError::Io { path: path.to_owned(), source: e })
}

pub fn ensure_dir(dir: &Path) -> Result<(), LabError> {
    fs::create_dir_all(dir).map_err(|e| LabError::Io { path: dir.to_owned(), source: e })
}
