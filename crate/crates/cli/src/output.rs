//! CSV and JSON rendering of result tables.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::CliResult;

pub const TOOL: &str = "qdrift-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Count(u128),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Count(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

/// Shortest round-trip decimal; scientific notation outside `[1e-4, 1e16)`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if !x.is_finite() {
        x.to_string()
    } else if (1e-4..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A finished table plus its JSON mirror.
#[derive(Debug, Clone)]
pub struct Report {
    pub schema: &'static str,
    pub convention: Option<String>,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    pub json_rows: Vec<Value>,
    /// Extra top-level JSON fields.
    pub extras: Map<String, Value>,
}

impl Report {
    pub fn new(schema: &'static str, columns: &'static [&'static str], convention: Option<String>) -> Self {
        Self { schema, convention, columns, rows: Vec::new(), json_rows: Vec::new(), extras: Map::new() }
    }

    pub fn push(&mut self, cells: Vec<Cell>, json_row: Value) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
        self.json_rows.push(json_row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# {TOOL} v{VERSION} schema={}", self.schema);
        if let Some(c) = &self.convention {
            out.push_str(&format!(" convention={c}"));
        }
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, seed: u64) -> String {
        let mut doc = Map::new();
        doc.insert("tool".into(), json!(TOOL));
        doc.insert("version".into(), json!(VERSION));
        doc.insert("schema".into(), json!(self.schema));
        if let Some(c) = &self.convention {
            doc.insert("convention".into(), json!(c));
        }
        doc.insert("seed".into(), json!(seed));
        doc.insert("columns".into(), json!(self.columns));
        for (k, v) in &self.extras {
            doc.insert(k.clone(), v.clone());
        }
        doc.insert("rows".into(), Value::Array(self.json_rows.clone()));
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
        text.push('\n');
        text
    }

    pub fn write(&self, json: bool, seed: u64, path: Option<&Path>) -> CliResult<()> {
        let text = if json { self.to_json(seed) } else { self.to_csv() };
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(text.as_bytes())?;
                lock.flush()?;
            }
        }
        Ok(())
    }
}
