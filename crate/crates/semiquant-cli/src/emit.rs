//! CSV and JSON emission.

use crate::config::Format;
use crate::error::CliResult;
use serde_json::Value;
use std::io::Write;
use std::path::Path;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Float(v.unwrap_or(f64::NAN))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// `printf("%.12e")` rendering: two-digit minimum exponent with sign.
pub fn sci(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent is always present");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => sci(*v),
            Cell::Text(t) => t.clone(),
        }
    }
}

/// Tabular result with optional `# key=value` preamble lines.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub preamble: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.preamble {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Result of one subcommand in both output forms.
#[derive(Clone, Debug)]
pub struct Report {
    pub table: Table,
    pub json: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.table.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("report values serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// Writes the report to `path`, or to standard output when absent.
pub fn emit(report: &Report, format: Format, path: Option<&Path>) -> CliResult<()> {
    let text = report.render(format);
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_format_matches_printf() {
        assert_eq!(sci(0.1), "1.000000000000e-01");
        assert_eq!(sci(-12345.678), "-1.234567800000e+04");
        assert_eq!(sci(0.0), "0.000000000000e+00");
        assert_eq!(sci(1e-300), "1.000000000000e-300");
        assert_eq!(sci(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["n", "E"]);
        t.preamble.push("E=1".into());
        t.push(vec![Cell::Int(1), Cell::Float(0.5)]);
        assert_eq!(t.to_csv(), "# E=1\nn,E\n1,5.000000000000e-01\n");
    }
}
