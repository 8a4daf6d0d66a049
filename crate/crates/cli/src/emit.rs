//! CSV and JSON rendering and atomic file output.
//!
//! Numbers carry 12 significant digits. CSV files start with a `#` block;
//! stripping the leading `# ` from it gives a TOML file that `--config`
//! accepts, so an output file is enough to rerun its experiment.

use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::error::CliError;

pub const TOOL: &str = concat!("deh ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// A table plus everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub config: Map<String, Value>,
    pub notes: Vec<String>,
    pub table: Table,
}

/// `{:.11e}`, i.e. 12 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.11e}")
    }
}

fn rounded(x: f64) -> Value {
    if x.is_finite() {
        let r: f64 = format_number(x).parse().expect("formatted number parses");
        json!(r)
    } else {
        Value::Null
    }
}

pub fn render(doc: &Document, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => render_csv(doc),
        Format::Json => Ok(render_json(doc)),
    }
}

pub fn render_csv(doc: &Document) -> Result<String, CliError> {
    let mut out = format!("# # {TOOL}\n");
    let cfg = toml::to_string(&doc.config)
        .map_err(|e| CliError::usage(format!("cannot render config: {e}")))?;
    for line in cfg.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for note in &doc.notes {
        out.push_str("# # ");
        out.push_str(note);
        out.push('\n');
    }
    out.push_str(&doc.table.columns.join(","));
    out.push('\n');
    for row in &doc.table.rows {
        let cells: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn render_json(doc: &Document) -> String {
    let rows: Vec<Value> = doc
        .table
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(|&x| rounded(x)).collect()))
        .collect();
    let v = json!({
        "tool": TOOL,
        "config": doc.config,
        "notes": doc.notes,
        "columns": doc.table.columns,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Writes to `path` through a temporary file in the same directory, so a
/// failed run leaves nothing behind; prints to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut stdout = io::stdout().lock();
        return stdout
            .write_all(contents.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::io("<stdout>", e));
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
