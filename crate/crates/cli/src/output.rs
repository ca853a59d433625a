use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    /// Shortest representation that parses back to the same `f64`.
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Writes `table` with a provenance header: `#` comment lines for CSV, a
/// wrapping object for JSON.
pub fn emit<W: Write>(out: W, format: Format, command: &str, config: &RunConfig, table: &Table) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(out, command, config, table),
        Format::Json => write_json(out, command, config, table),
    }
}

fn write_csv<W: Write>(mut out: W, command: &str, config: &RunConfig, table: &Table) -> std::io::Result<()> {
    writeln!(out, "# spread-fft {VERSION} {command}")?;
    writeln!(out, "# config {}", serde_json::to_string(config).expect("config serializes"))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.flush()
}

#[derive(Serialize)]
struct Document<'a> {
    version: &'a str,
    command: &'a str,
    config: &'a RunConfig,
    rows: Vec<Map<String, Value>>,
}

fn write_json<W: Write>(mut out: W, command: &str, config: &RunConfig, table: &Table) -> std::io::Result<()> {
    let rows = table
        .rows
        .iter()
        .map(|r| table.columns.iter().map(|c| c.to_string()).zip(r.iter().map(Cell::json)).collect())
        .collect();
    let doc = Document {
        version: VERSION,
        command,
        config,
        rows,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)
}

/// Machine-readable failure record.
pub fn error_record(code: i32, message: &str) -> String {
    let kind = if code == 2 { "config" } else { "numerical" };
    json!({ "error": { "code": code, "kind": kind, "message": message }, "version": VERSION }).to_string()
}
