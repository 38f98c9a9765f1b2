//! CSV and JSON writers.
//!
//! CSV files have a header row, LF line endings and floats printed with 17
//! significant digits so that reruns are byte-identical. JSON keeps the
//! column order of the CSV form.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    /// Column present but not applicable to this row.
    Missing,
}

impl Value {
    fn write_csv(&self, out: &mut String) {
        match *self {
            Value::Num(v) if v.is_finite() => write!(out, "{v:.16e}").unwrap(),
            Value::Num(v) if v.is_nan() => out.push_str("NaN"),
            Value::Num(v) if v > 0.0 => out.push_str("inf"),
            Value::Num(_) => out.push_str("-inf"),
            Value::Int(v) => write!(out, "{v}").unwrap(),
            Value::Bool(b) => out.push_str(if b { "true" } else { "false" }),
            Value::Missing => {}
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            // JSON has no literal for non-finite numbers.
            Value::Num(v) if v.is_nan() => s.serialize_none(),
            Value::Num(v) if v.is_infinite() => {
                s.serialize_str(if v > 0.0 { "inf" } else { "-inf" })
            }
            Value::Num(v) => s.serialize_f64(v),
            Value::Int(v) => s.serialize_u64(v),
            Value::Bool(b) => s.serialize_bool(b),
            Value::Missing => s.serialize_none(),
        }
    }
}

/// Named columns and their rows. A single-record table is written as a JSON
/// object rather than an array.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub record: bool,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            record: false,
        }
    }

    pub fn record(fields: Vec<(&str, Value)>) -> Self {
        let (columns, row): (Vec<_>, Vec<_>) =
            fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        Self {
            columns,
            rows: vec![row],
            record: true,
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                v.write_csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&JsonView(self)).expect("in-memory serialization");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

struct JsonView<'a>(&'a Table);
struct JsonRow<'a>(&'a [String], &'a [Value]);

impl Serialize for JsonRow<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for JsonView<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let t = self.0;
        if t.record {
            return JsonRow(&t.columns, &t.rows[0]).serialize(s);
        }
        let mut seq = s.serialize_seq(Some(t.rows.len()))?;
        for row in &t.rows {
            seq.serialize_element(&JsonRow(&t.columns, row))?;
        }
        seq.end()
    }
}

/// Write to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // a closed pipe (`| head`) is not an error
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
                path: "<stdout>".into(),
                source: e,
            }),
            _ => Ok(()),
        },
    }
}
