//! Long-format sweep results and their CSV serialization.
//!
//! The CSV dialect is RFC-4180-style with a fixed layout chosen for
//! byte-level reproducibility: leading `# key = value` metadata comment
//! lines, one header row, `\n` line endings, '.' decimal separator.
//! Result quantities (probabilities, standard errors, rates) are written
//! in six-digit scientific notation (`1.230000e-5`); axis values keep
//! their natural display form. Rows whose evaluation failed are kept in
//! place as `# error at …` comment lines, so a partial sweep still
//! yields a machine-readable file of the successful rows without hiding
//! the failures.

use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

// ---------------------------------------------------------------------------
// Cells and rows
// ---------------------------------------------------------------------------

/// One CSV cell with its display convention.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Integer-valued axis cell (element counts, hop counts).
    Int(i64),
    /// Axis cell in natural display form (dB values, km, variances).
    Float(f64),
    /// Result quantity in fixed six-digit scientific notation.
    Sci(f64),
    /// Free-form label (scenario ids).
    Text(String),
    /// Requested but unavailable value; renders as an empty cell.
    Missing,
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::Float(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::Sci(v) => {
                let _ = write!(out, "{v:.6e}");
            }
            Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    let _ = write!(out, "\"{}\"", s.replace('"', "\"\""));
                } else {
                    out.push_str(s);
                }
            }
            Cell::Missing => {}
        }
    }
}

/// One sweep row: cells aligned with the header, or an error marker when
/// the evaluation of this grid point failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub cells: Vec<Cell>,
    pub error: Option<String>,
}

/// Ordered sweep output plus reproducibility metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// `(key, value)` pairs emitted as leading comment lines.
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn new(header: Vec<String>) -> Self {
        SweepResult {
            metadata: Vec::new(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn add_metadata(&mut self, key: &str, value: impl std::fmt::Display) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push_row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(SweepRow { cells, error: None });
    }

    /// Keep a failed grid point in place; `cells` should carry at least
    /// the axis coordinates so the marker line is self-describing.
    pub fn push_error_row(&mut self, cells: Vec<Cell>, message: String) {
        self.rows.push(SweepRow {
            cells,
            error: Some(message),
        });
    }

    /// Serialize to the CSV dialect described in the module docs.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            let _ = writeln!(out, "# {key} = {}", value.replace('\n', " "));
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            if let Some(message) = &row.error {
                out.push_str("# error at ");
                for (i, (name, cell)) in self.header.iter().zip(&row.cells).enumerate() {
                    if matches!(cell, Cell::Missing) {
                        continue;
                    }
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(name);
                    out.push('=');
                    cell.render(&mut out);
                }
                out.push_str(": ");
                out.push_str(&message.replace('\n', " "));
                out.push('\n');
            } else {
                for (i, cell) in row.cells.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    cell.render(&mut out);
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Write the result as CSV to `destination`.
pub fn emit_csv(result: &SweepResult, destination: &Path) -> Result<()> {
    std::fs::write(destination, result.to_csv_string()).map_err(|source| Error::Io {
        path: destination.to_path_buf(),
        source,
    })
}

// ---------------------------------------------------------------------------
