use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use tempfile::NamedTempFile;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // Debug is the shortest representation that round-trips.
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Header plus rows, with an optional free-form summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Option<Value>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Position of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Floating-point column values; non-float cells are skipped.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter_map(|r| match r[i] {
                Cell::Float(v) => Some(v),
                _ => None,
            })
            .collect()
    }

    pub fn to_csv(&self, meta: &Value) -> Result<String> {
        let mut out = format!("# {}\n", serde_json::to_string(meta)?);
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::csv_text))?;
        }
        let body = writer
            .into_inner()
            .map_err(|e| Error::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        if let Some(summary) = &self.summary {
            out.push_str(&format!("# summary {}\n", serde_json::to_string(summary)?));
        }
        Ok(out)
    }

    pub fn to_json(&self, meta: &Value) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let fields: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), v.json()))
                    .collect();
                Value::Object(fields)
            })
            .collect();
        let mut doc = json!({
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
        });
        if let Some(summary) = &self.summary {
            doc["summary"] = summary.clone();
        }
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }
}

/// Metadata record heading every output: tool version, seed and the parsed
/// configuration.
pub(crate) fn metadata<C: Serialize>(command: &str, seed: u64, config: &C) -> Result<Value> {
    Ok(json!({
        "tool": "hifi",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "config": serde_json::to_value(config)?,
    }))
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub(crate) fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["n", "profile", "value"]);
        t.push(vec![Cell::from(2usize), Cell::from("linear"), Cell::from(1.0 / 3.0)]);
        t.push(vec![Cell::from(3usize), Cell::from("a,b"), Cell::from(1e-20)]);
        t
    }

    #[test]
    fn csv_round_trips_floats() {
        let csv = sample().to_csv(&json!({"seed": 1})).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# {\"seed\":1}"));
        assert_eq!(lines.next(), Some("n,profile,value"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[2].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(lines.next(), Some("3,\"a,b\",1e-20"));
    }

    #[test]
    fn json_mirrors_columns() {
        let text = sample().to_json(&json!({})).unwrap();
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["rows"][0]["value"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(doc["rows"][1]["profile"], "a,b");
        assert_eq!(doc["columns"][2], "value");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
    }
}
