//! Output rendering and file plumbing.
//!
//! CSV cells carry 12 significant digits with a '.' separator and no locale
//! dependence; JSON carries full-precision floats. Files are written once,
//! atomically: the contents go to a temp file in the target directory, which
//! is then renamed over the destination.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One typed output cell; the type decides how CSV and JSON render it.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Count(u64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Count(n) => n.to_string(),
            Cell::Real(x) => fmt_sig(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Count(n) => json!(n),
            Cell::Real(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Column-ordered result rows. The column order is part of the output schema
/// and never changes within a major version.
#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }
}

/// Format with 12 significant digits, trailing zeros trimmed. Fixed notation
/// while the decimal exponent of the rounded value lies in [-4, 12),
/// scientific otherwise.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // Round to 12 significant digits first; the exponent of the rounded value
    // decides the notation (9.99...e2 must print as 1000, not 999.999...).
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("float exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// CSV bytes: an optional `#` comment line with the generation time, then the
/// header row, then one record per result row.
pub fn render_csv(table: &Table, timestamp: Option<u64>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp {
        out.push_str(&format!(
            "# tool_version={TOOL_VERSION} generated_unix_s={ts}\n"
        ));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(&table.columns)
        .expect("in-memory csv write");
    for row in &table.rows {
        writer
            .write_record(row.iter().map(Cell::csv))
            .expect("in-memory csv write");
    }
    let bytes = writer.into_inner().expect("in-memory csv flush");
    out.push_str(std::str::from_utf8(&bytes).expect("csv output is utf-8"));
    out
}

/// JSON document `{ "meta": ..., "rows": [...] }` with one object per row,
/// keys in column order.
pub fn render_json(table: &Table, meta: Value) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (name, cell) in table.columns.iter().zip(row) {
                obj.insert(name.clone(), cell.json());
            }
            Value::Object(obj)
        })
        .collect();
    let doc = json!({ "meta": meta, "rows": rows });
    let mut text = serde_json::to_string_pretty(&doc).expect("json render");
    text.push('\n');
    text
}

pub fn meta_object(seed: Option<u64>, timestamp: Option<u64>) -> Value {
    let mut meta = Map::new();
    meta.insert("tool_version".to_string(), json!(TOOL_VERSION));
    if let Some(seed) = seed {
        meta.insert("seed".to_string(), json!(seed));
    }
    if let Some(ts) = timestamp {
        meta.insert("generated_unix_s".to_string(), json!(ts));
    }
    Value::Object(meta)
}

pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Write atomically when a path is given, stream to stdout otherwise.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    let Some(path) = path else {
        return std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::Io(format!("writing to stdout: {e}")));
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Io(format!("creating temp file in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("replacing {}: {e}", path.display())))?;
    Ok(())
}
