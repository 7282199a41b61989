//! Result records and their CSV / JSON renderings.
//!
//! CSV layout: `#`-prefixed echo lines with the resolved configuration, the
//! header row, one line per record, then `#`-prefixed summary lines. JSON
//! layout: one object with keys `config`, `rows`, `schema_version`, `summary`
//! (object keys are always sorted). Floats are rounded to 12 significant
//! digits before rendering, so output is stable at the textual level.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;

/// Column order of result rows.
pub const RESULT_COLUMNS: [&str; 17] = [
    "schema_version",
    "command",
    "system",
    "potential",
    "measure",
    "kind",
    "q",
    "n",
    "eps",
    "M",
    "seed",
    "method",
    "value",
    "covered_mass",
    "centers",
    "walltime_ms",
    "status",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Empty,
    Str(String),
    Int(u64),
    Num(f64),
}

impl Field {
    pub fn str(s: impl Into<String>) -> Field {
        Field::Str(s.into())
    }

    pub fn opt_num(x: Option<f64>) -> Field {
        x.map_or(Field::Empty, Field::Num)
    }

    fn text(&self) -> String {
        match self {
            Field::Empty => String::new(),
            Field::Str(s) => s.clone(),
            Field::Int(i) => i.to_string(),
            Field::Num(x) => round12(*x).map(format_num).unwrap_or_default(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Empty => Value::Null,
            Field::Str(s) => Value::String(s.clone()),
            Field::Int(i) => Value::from(*i),
            Field::Num(x) => round12(*x).map_or(Value::Null, Value::from),
        }
    }
}

/// `x` rounded to 12 significant digits; `None` if not finite.
pub fn round12(x: f64) -> Option<f64> {
    if !x.is_finite() {
        return None;
    }
    let v: f64 = format!("{x:.11e}").parse().ok()?;
    // normalize -0
    Some(if v == 0.0 { 0.0 } else { v })
}

/// Shortest round-trip text; scientific notation outside `[1e-4, 1e15)`.
fn format_num(v: f64) -> String {
    if v != 0.0 && !(1e-4..1e15).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

/// Ordered `(name, value)` pairs.
pub type Record = Vec<(&'static str, Field)>;

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub echo: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Record>,
    pub summary: Vec<Record>,
}

impl Report {
    pub fn new(echo: Vec<(String, String)>, columns: &[&'static str]) -> Report {
        Report { echo, columns: columns.to_vec(), rows: Vec::new(), summary: Vec::new() }
    }

    pub fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => Ok(self.json()),
        }
    }

    fn csv(&self) -> CliResult<Vec<u8>> {
        let mut out = Vec::new();
        writeln!(out, "# orbit-pressure schema_version={SCHEMA_VERSION}")?;
        for (k, v) in &self.echo {
            writeln!(out, "# {k}={v}")?;
        }
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(self.columns.iter().map(|c| lookup(row, c).map(Field::text).unwrap_or_default()))?;
            }
            w.flush()?;
        }
        for rec in &self.summary {
            let parts: Vec<String> = rec.iter().map(|(k, v)| format!("{k}={}", v.text())).collect();
            writeln!(out, "# {}", parts.join(" "))?;
        }
        Ok(out)
    }

    fn json(&self) -> Vec<u8> {
        let object = |rec: &Record| -> Value {
            Value::Object(rec.iter().map(|(k, v)| (k.to_string(), v.json())).collect::<Map<_, _>>())
        };
        let mut root = Map::new();
        root.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        root.insert(
            "config".into(),
            Value::Object(self.echo.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect()),
        );
        root.insert("rows".into(), Value::Array(self.rows.iter().map(object).collect()));
        root.insert("summary".into(), Value::Array(self.summary.iter().map(object).collect()));
        let mut out = serde_json::to_vec_pretty(&Value::Object(root)).unwrap_or_default();
        out.push(b'\n');
        out
    }
}

fn lookup<'a>(rec: &'a Record, key: &str) -> Option<&'a Field> {
    rec.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers see either the old file or the complete new one.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
