//! Artifact tables and their JSON / CSV encodings.

use std::io::Write;

use anyhow::Result;
use serde_json::{Map, Number, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        // keeps -0.0 and 0.0 apart without a signed exponent form
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    format!("{x:.16e}")
}

pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(fmt_float(x).parse::<Number>().expect("formatted float is a JSON number"))
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => float(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => fmt_float(*v),
            Cell::Float(_) => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// Rows with a fixed column list, plus an optional summary object that only
/// the JSON encoding carries.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Option<Map<String, Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn meta(config: &RunConfig, half_width: &Value) -> Value {
    let p = &config.params;
    let mut m = Map::new();
    m.insert("q".into(), float(p.q()));
    m.insert("alpha".into(), float(p.alpha()));
    m.insert("beta".into(), float(p.beta()));
    m.insert("tol".into(), float(config.tol));
    m.insert("half_width".into(), half_width.clone());
    m.insert("seed".into(), Value::from(config.seed));
    m.insert("tool_version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    Value::Object(m)
}

pub fn to_json(table: &Table, config: &RunConfig, half_width: &Value) -> Value {
    let data: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            Value::Object(
                table
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(k, c)| (k.to_string(), c.to_json()))
                    .collect(),
            )
        })
        .collect();
    let mut top = Map::new();
    top.insert("meta".into(), meta(config, half_width));
    top.insert("data".into(), Value::Array(data));
    if let Some(s) = &table.summary {
        top.insert("summary".into(), Value::Object(s.clone()));
    }
    Value::Object(top)
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for r in &table.rows {
        w.write_record(r.iter().map(Cell::to_csv))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the artifact to `config.output`, or to stdout.
pub fn emit(table: &Table, config: &RunConfig, half_width: &Value) -> Result<()> {
    let mut buf = Vec::new();
    match config.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &to_json(table, config, half_width))?;
            buf.push(b'\n');
        }
        Format::Csv => write_csv(table, &mut buf)?,
    }
    match &config.output {
        Some(path) => std::fs::write(path, &buf)
            .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?,
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}
