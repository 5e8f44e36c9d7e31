//! CSV reports: one header line, comma-separated, `\n` line ends.
//!
//! Floats go through [`num`], which prints the shortest text that parses back to the
//! same value, so equal values always print the same way.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push<D: Display>(&mut self, row: impl IntoIterator<Item = D>) {
        let row: Vec<String> = row.into_iter().map(|v| v.to_string()).collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }
}

/// Shortest round-trip text for `x`; scientific notation outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A named report to be written into an output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedCsv {
    pub name: String,
    pub csv: Csv,
}

impl NamedCsv {
    pub fn new(name: impl Into<String>, csv: Csv) -> Self {
        Self { name: name.into(), csv }
    }
}

/// Writes every report into `dir`, creating it if needed, and returns the paths.
pub fn write_all(dir: &Path, reports: &[NamedCsv]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    reports
        .iter()
        .map(|r| {
            let path = dir.join(&r.name);
            r.csv.write(&path)?;
            Ok(path)
        })
        .collect()
}

/// A filesystem-safe version of a label such as `qcqp-1000`.
pub fn file_stem(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_header_and_rows() {
        let mut c = Csv::new(["a", "b"]);
        c.push([num(1.5), num(-0.1)]);
        c.push([num(f64::NEG_INFINITY), num(1e-300)]);
        c.push([num(5.0863e-6), num(123456789.0)]);
        assert_eq!(c.render(), "a,b\n1.5,-0.1\n-inf,1e-300\n5.0863e-6,123456789\n");
        for x in [1.0 / 3.0, 7.7610e-11, -2.5e20, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(file_stem("qcqp-1000 / b8"), "qcqp-1000___b8");
    }
}
