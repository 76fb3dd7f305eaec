//! Byte-deterministic CSV output: header row plus rows of typed values,
//! floats carrying 17 significant digits, LF line endings, UTF-8.

use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

/// One CSV cell.
#[derive(Debug, Clone, Copy)]
pub enum Value {
    Int(i64),
    UInt(u64),
    Float(f64),
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::UInt(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

/// Renders header + rows. Non-finite floats are a hard error: a NaN must
/// never be silently serialized.
pub fn render_csv(header: &[&str], rows: &[Vec<Value>]) -> Result<String, CliError> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(CliError::usage(format!(
                "row {i} has {} fields, header has {}",
                row.len(),
                header.len()
            )));
        }
        for (j, value) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            match *value {
                Value::Int(v) => write!(out, "{v}").unwrap(),
                Value::UInt(v) => write!(out, "{v}").unwrap(),
                Value::Float(v) => {
                    if !v.is_finite() {
                        return Err(CliError::range(format!(
                            "refusing to serialize non-finite value {v} in column '{}' row {i}",
                            header[j]
                        )));
                    }
                    // 1 + 16 digits of mantissa: 17 significant digits.
                    write!(out, "{v:.16e}").unwrap();
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Value>]) -> Result<(), CliError> {
    let body = render_csv(header, rows)?;
    std::fs::write(path, body)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}
