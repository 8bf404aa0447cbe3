//! Tabular output: CSV with 17 significant digits, JSON, and atomic file writes.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One CSV/JSON cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell_text).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
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

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_g17(*x),
        Cell::Text(t) => t.clone(),
    }
}

/// `%.17g`: 17 significant digits, shortest of fixed or scientific
/// notation, trailing zeros removed. Always uses `.` as decimal separator.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        let mut m = trim_zeros(mantissa);
        let _ = write!(m, "e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
        m
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Renders a JSON object as `key,value` CSV rows, one per scalar field;
/// nested arrays and objects are written as compact JSON strings in quotes.
pub fn json_to_key_value_csv(value: &Value) -> String {
    let mut out = String::from("key,value\n");
    if let Value::Object(map) = value {
        for (k, v) in map {
            let text = match v {
                Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), format_g17),
                Value::String(s) => s.clone(),
                Value::Bool(b) => b.to_string(),
                Value::Null => String::new(),
                other => format!("\"{}\"", other.to_string().replace('"', "\"\"")),
            };
            let _ = writeln!(out, "{k},{text}");
        }
    }
    out
}

pub fn render_json_value(value: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("value serializes");
            s.push('\n');
            s
        }
        Format::Csv => json_to_key_value_csv(value),
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(contents.as_bytes())?;
            lock.flush()?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(contents.as_bytes())?;
            tmp.flush()?;
            // temp files are created owner-only; published data should not be
            #[cfg(unix)]
            {
                use std::os::unix::fs::PermissionsExt;
                std::fs::set_permissions(tmp.path(), std::fs::Permissions::from_mode(0o644))?;
            }
            tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(-2.25), "-2.25");
        assert_eq!(format_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(0.0), "0");
        assert_eq!(format_g17(123456.0), "123456");
    }

    #[test]
    fn g17_round_trips() {
        for x in [
            0.1,
            1.0 / 3.0,
            std::f64::consts::PI,
            1e-300,
            6.02e23,
            -7.5e-6,
            1.0 - 0.5f64.sqrt(),
        ] {
            let s = format_g17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![0.5.into(), "x".into()]);
        assert_eq!(t.to_csv(), "a,b\n0.5,x\n");
    }

    #[test]
    fn key_value_csv() {
        let v = serde_json::json!({"I": 0.5, "ok": true, "px": [0.5, 0.5]});
        let s = json_to_key_value_csv(&v);
        assert!(s.starts_with("key,value\n"));
        assert!(s.contains("I,0.5\n"));
        assert!(s.contains("ok,true\n"));
        assert!(s.contains("px,\"[0.5,0.5]\"\n"));
    }
}
