//! String tables with deterministic CSV and JSON output.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Fixed-point rendering of a real with `digits` decimals.
pub fn real(x: f64, digits: usize) -> String {
    if x.is_finite() {
        format!("{x:.digits$}")
    } else {
        x.to_string()
    }
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Invariant(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = rd.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            rows.push(rec?.iter().map(String::from).collect());
        }
        Ok(Table { header, rows })
    }

    /// Array of objects, one per row, with string values in column order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let mut m = Map::new();
                    for (k, v) in self.header.iter().zip(r) {
                        m.insert(k.clone(), Value::String(v.clone()));
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Config("expected a JSON array".into()))?;
        let mut t = Table::default();
        for (i, obj) in arr.iter().enumerate() {
            let obj = obj.as_object().ok_or_else(|| Error::Config("expected objects".into()))?;
            if i == 0 {
                t.header = obj.keys().cloned().collect();
            }
            let row = t
                .header
                .iter()
                .map(|k| obj.get(k).and_then(Value::as_str).map(String::from))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Config("ragged JSON table".into()))?;
            t.rows.push(row);
        }
        Ok(t)
    }
}

/// Writes the table to the given CSV and JSON paths.
pub fn emit(table: &Table, csv_path: Option<&Path>, json_path: Option<&Path>) -> Result<()> {
    if let Some(p) = csv_path {
        let f = std::fs::File::create(p)?;
        table.write_csv(std::io::BufWriter::new(f))?;
    }
    if let Some(p) = json_path {
        let mut s = serde_json::to_string_pretty(&table.to_json())?;
        s.push('\n');
        std::fs::write(p, s)?;
    }
    Ok(())
}
