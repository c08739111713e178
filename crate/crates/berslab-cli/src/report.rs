//! Machine-readable certificates and CSV emission.
//!
//! CSV files carry a header row, comma separators, and 17 significant digits
//! so identical configurations produce bit-identical outputs.

use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

/// One residual check: pass iff residual <= tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub check_name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub paper_anchor: String,
}

impl Certificate {
    pub fn new(
        check_name: &str,
        lhs: f64,
        rhs: f64,
        residual: f64,
        tolerance: f64,
        paper_anchor: &str,
    ) -> Self {
        Self {
            check_name: check_name.to_string(),
            lhs,
            rhs,
            residual,
            tolerance,
            pass: residual <= tolerance,
            paper_anchor: paper_anchor.to_string(),
        }
    }

    /// Boolean check reported through the same schema (residual 0 or 1).
    pub fn boolean(check_name: &str, ok: bool, paper_anchor: &str) -> Self {
        Self::new(check_name, if ok { 1.0 } else { 0.0 }, 1.0, if ok { 0.0 } else { 1.0 }, 0.5, paper_anchor)
    }
}

/// Format a float with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a CSV table: header row + rows of 17-significant-digit columns.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| sig17(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())
}

/// Serialize certificates as a JSON array (pretty, stable field order).
pub fn write_certificates(path: &Path, certs: &[Certificate]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let json = serde_json::to_string_pretty(certs).expect("certificates serialize");
    fs::write(path, json)
}
