// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Locale-independent CSV and JSON writers with a fixed number of
//! significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::error::CliError;

/// Rounds to `digits` significant digits and prints the shortest decimal
/// that reads back as the rounded value. Very small or very large
/// magnitudes use exponent notation (`2.5e-7`).
pub fn format_number(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x, digits);
    if r == 0.0 {
        return "0".into();
    }
    let exp = r.abs().log10().floor();
    if (-5.0..15.0).contains(&exp) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    s.parse().unwrap_or(x)
}

/// JSON number rounded like the CSV output; non-finite values become null.
pub fn json_number(x: f64, digits: usize) -> Value {
    Number::from_f64(round_sig(x, digits)).map_or(Value::Null, Value::Number)
}

pub fn json_opt(x: Option<f64>, digits: usize) -> Value {
    x.map_or(Value::Null, |v| json_number(v, digits))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    /// Written as an empty CSV field or a JSON null.
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
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

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_number(*x, digits),
                    Cell::Int(n) => n.to_string(),
                    Cell::Text(s) => s.clone(),
                    Cell::Missing => String::new(),
                })
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// An array of row objects keyed by column name.
    pub fn to_json(&self, digits: usize) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, c) in self.columns.iter().zip(row) {
                    let v = match c {
                        Cell::Num(x) => json_number(*x, digits),
                        Cell::Int(n) => Value::from(*n),
                        Cell::Text(s) => Value::from(s.as_str()),
                        Cell::Missing => Value::Null,
                    };
                    obj.insert((*name).to_string(), v);
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

/// Writes files into one output directory, created on first use.
pub struct OutputDir {
    dir: PathBuf,
    format: Format,
    digits: usize,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn new(dir: &Path, format: Format, digits: usize) -> Self {
        Self {
            dir: dir.to_path_buf(),
            format,
            digits,
            written: Vec::new(),
        }
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        fs::create_dir_all(&self.dir).map_err(io(&self.dir))?;
        let path = self.dir.join(name);
        let mut text = text.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        fs::write(&path, text).map_err(io(&path))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<PathBuf, CliError> {
        let text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
        self.write_text(name, &text)
    }

    /// Writes `<stem>.csv` or `<stem>.json` according to the chosen format.
    pub fn write_table(&mut self, stem: &str, table: &Table) -> Result<PathBuf, CliError> {
        match self.format {
            Format::Csv => self.write_text(&format!("{stem}.csv"), &table.to_csv(self.digits)),
            Format::Json => self.write_json(&format!("{stem}.json"), &table.to_json(self.digits)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_number(std::f64::consts::PI, 5), "3.1416");
        assert_eq!(format_number(0.1 + 0.2, 12), "0.3");
        assert_eq!(format_number(-1234.5678, 3), "-1230");
        assert_eq!(format_number(1.5e-7, 2), "1.5e-7");
        assert_eq!(format_number(2.5e-5, 12), "0.000025");
        assert_eq!(format_number(6.02e23, 3), "6.02e23");
        assert_eq!(format_number(0.0, 12), "0");
        assert_eq!(format_number(-0.0, 12), "0");
        assert_eq!(format_number(f64::NAN, 12), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["t", "direction"]);
        t.push(vec![Cell::Num(1.25), Cell::Text("up".into())]);
        t.push(vec![Cell::Missing, Cell::Int(3)]);
        assert_eq!(t.to_csv(12), "t,direction\n1.25,up\n,3\n");
    }

    #[test]
    fn json_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Num(2.0 / 3.0), Cell::Missing]);
        let v = t.to_json(3);
        assert_eq!(v[0]["a"], serde_json::json!(0.667));
        assert!(v[0]["b"].is_null());
    }
}
