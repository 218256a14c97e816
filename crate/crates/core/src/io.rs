//! CSV and JSON serialization of spectra and sweeps.
//!
//! CSV files carry `# key: value` metadata lines, then a header row, then one
//! row per sample. Numbers use shortest round-trip formatting, so parsing an
//! emitted file reproduces every finite value bit for bit.

use std::io::{BufRead, Write};

use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

use crate::steady_state::SpectrumSeries;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed CSV at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Named columns of equal length plus metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(metadata: Vec<(String, String)>) -> Self {
        Self {
            metadata,
            header: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn with_column(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        debug_assert!(self.columns.first().is_none_or(|c| c.len() == values.len()));
        self.header.push(name.into());
        self.columns.push(values);
        self
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.header
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "{}", self.header.join(","))?;
        for row in 0..self.rows() {
            let line: Vec<String> = self.columns.iter().map(|c| c[row].to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, IoError> {
        let mut table = Table::new(Vec::new());
        let mut have_header = false;
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            if let Some(meta) = line.strip_prefix('#') {
                let (k, v) = meta.split_once(':').unwrap_or((meta, ""));
                table.metadata.push((k.trim().to_string(), v.trim().to_string()));
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if !have_header {
                table.header = line.split(',').map(|s| s.trim().to_string()).collect();
                table.columns = vec![Vec::new(); table.header.len()];
                have_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != table.header.len() {
                return Err(IoError::Parse {
                    line: lineno,
                    msg: format!("expected {} fields, got {}", table.header.len(), fields.len()),
                });
            }
            for (col, field) in table.columns.iter_mut().zip(fields) {
                let x = field.trim().parse::<f64>().map_err(|e| IoError::Parse {
                    line: lineno,
                    msg: format!("'{field}': {e}"),
                })?;
                col.push(x);
            }
        }
        if !have_header {
            return Err(IoError::Parse {
                line: 0,
                msg: "missing header row".into(),
            });
        }
        Ok(table)
    }

    /// `{"metadata": {...}, "<column>": [...], ...}`.
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("metadata".into(), metadata_json(&self.metadata));
        for (name, col) in self.header.iter().zip(&self.columns) {
            obj.insert(name.clone(), json!(col));
        }
        Value::Object(obj)
    }
}

pub fn metadata_json(metadata: &[(String, String)]) -> Value {
    Value::Object(
        metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect(),
    )
}

/// Two-column `delta_p,value` table for a series.
pub fn series_table(series: &SpectrumSeries, metadata: Vec<(String, String)>) -> Table {
    let mut metadata = metadata;
    metadata.push(("observable".into(), series.label.clone()));
    Table::new(metadata)
        .with_column("delta_p", series.delta_p_grid.clone())
        .with_column("value", series.values.clone())
}

/// Reads back a `delta_p,value` table written by [`series_table`].
pub fn series_from_table(table: &Table) -> Option<SpectrumSeries> {
    let label = table
        .metadata
        .iter()
        .find(|(k, _)| k == "observable")
        .map_or_else(|| "value".to_string(), |(_, v)| v.clone());
    SpectrumSeries::new(
        table.column("delta_p")?.to_vec(),
        table.column("value")?.to_vec(),
        label,
    )
    .ok()
}

/// A complex number as `[re, im]`.
pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}
