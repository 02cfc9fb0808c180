use std::fs;
use std::path::Path;

use crate::error::{io_at, CliError};

/// A CSV table preceded by `# key: value` metadata lines.
#[derive(Clone, Debug, Default)]
pub struct Table {
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { meta: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, csv::Error> {
        let mut out = Vec::new();
        for (k, v) in &self.meta {
            for line in v.lines() {
                out.extend_from_slice(format!("# {k}: {line}\n").as_bytes());
            }
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let bytes = self.to_bytes().map_err(|e| io_at(path, e))?;
        fs::write(path, bytes).map_err(|e| io_at(path, e))
    }
}

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
