//! Tables written as CSV or JSON.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::spec::Format;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // 17 significant digits round-trip every f64.
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Real(v) if v.is_finite() => json!(v),
            Cell::Real(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &'static str, header: Vec<&'static str>) -> Self {
        Self { schema, header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::numerical(format!("CSV output failed: {e}"));
                w.write_record(&self.header).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::numerical(format!("CSV output failed: {e}")))?;
                String::from_utf8(bytes).map_err(|e| Error::numerical(e.to_string()))
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        // `name_re, name_im` column pairs become `name: [re, im]`.
                        let mut m = Map::new();
                        let mut i = 0;
                        while i < row.len() {
                            let h = self.header[i];
                            if let Some(stem) = h.strip_suffix("_re") {
                                if self.header.get(i + 1).and_then(|n| n.strip_suffix("_im")) == Some(stem) {
                                    m.insert(stem.to_string(), json!([row[i].json(), row[i + 1].json()]));
                                    i += 2;
                                    continue;
                                }
                            }
                            m.insert(h.to_string(), row[i].json());
                            i += 1;
                        }
                        Value::Object(m)
                    })
                    .collect();
                let doc = json!({ "schema": self.schema, "rows": rows });
                serde_json::to_string_pretty(&doc).map(|s| s + "\n").map_err(|e| Error::numerical(e.to_string()))
            }
        }
    }
}

/// Writes to `out` when given, otherwise to stdout.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Error::input(format!("cannot write to stdout: {e}")))
        }
    }
}
