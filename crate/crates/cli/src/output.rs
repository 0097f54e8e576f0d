//! Result tables and their CSV / JSON renderings.
//!
//! Both formats embed the effective configuration so a result file is enough
//! to reproduce the run. JSON floats carry 17 significant digits; CSV floats
//! use the shortest text that parses back to the same value. Either way
//! identical inputs give byte-identical files.

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::io::Write;

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(usize),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Float(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(v) => json!(v),
            Cell::Bool(v) => json!(v),
        }
    }

    fn to_field(&self) -> String {
        match self {
            // Same shortest round-trip text as the JSON output, exponent included.
            Cell::Float(v) => serde_json::to_string(v).unwrap_or_else(|_| v.to_string()),
            Cell::Int(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn records(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| ((*c).to_owned(), v.to_json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// What a command produced: a flat table for CSV and, optionally, a more
/// structured JSON payload (a matrix for parameter maps, say).
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub json: Option<Value>,
}

impl From<Table> for Report {
    fn from(table: Table) -> Self {
        Self { table, json: None }
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Compact JSON with every float written as `d.ddddddddddddddddde±x`.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn write_json<W: Write>(out: W, value: &impl Serialize) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(out, FullPrecision);
    value.serialize(&mut ser)?;
    Ok(())
}

pub fn render(
    report: &Report,
    config: &RunConfig,
    format: Format,
    out: &mut dyn Write,
) -> Result<()> {
    match format {
        Format::Json => {
            let data = report
                .json
                .clone()
                .unwrap_or_else(|| report.table.records());
            let doc = json!({ "config": config, "data": data });
            write_json(&mut *out, &doc)?;
            writeln!(out)?;
        }
        Format::Csv => {
            write!(out, "# config: ")?;
            write_json(&mut *out, config)?;
            writeln!(out)?;
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(&report.table.columns)?;
            for row in &report.table.rows {
                w.write_record(row.iter().map(Cell::to_field))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_config_header() {
        let mut t = Table::new(&["x", "ok"]);
        t.push(vec![0.1.into(), true.into()]);
        t.push(vec![1.25e-11.into(), false.into()]);
        let mut buf = Vec::new();
        render(&t.into(), &RunConfig::default(), Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# config: {}\nx,ok\n0.1,true\n1.25e-11,false\n");
    }

    #[test]
    fn json_records() {
        let mut t = Table::new(&["x"]);
        t.push(vec![2.5.into()]);
        let mut buf = Vec::new();
        render(&t.into(), &RunConfig::default(), Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["data"][0]["x"], json!(2.5));
        assert_eq!(v["config"], json!({}));
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("2.5000000000000000e0"), "{text}");
    }

    #[test]
    fn json_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -1.25e-11, f64::MIN_POSITIVE] {
            let mut buf = Vec::new();
            write_json(&mut buf, &x).unwrap();
            let back: f64 = serde_json::from_slice(&buf).unwrap();
            assert_eq!(back, x);
        }
    }
}
