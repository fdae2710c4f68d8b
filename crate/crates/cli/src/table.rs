//! Numeric result tables and their CSV form.
//!
//! Every value is an `f64` printed as `{:.16e}` (17 significant digits), so
//! a written file parses back to bit-identical values on any locale. Writing
//! an empty table is an error and creates no file.

use std::fs;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push_row(&mut self, row: impl Into<Vec<f64>>) {
        let row = row.into();
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    /// Values of one column by header name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let joined: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&joined.join(","));
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        if self.rows.is_empty() {
            return Err(CliError::EmptyTable(path.to_path_buf()));
        }
        fs::write(path, self.to_csv()).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn parse_csv(text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| CliError::Csv("missing header line".into()))?;
        let columns: Vec<String> = header.split(',').map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, _> = line.split(',').map(str::parse).collect();
            let row = row.map_err(|e| CliError::Csv(format!("row {i}: {e}")))?;
            if row.len() != columns.len() {
                return Err(CliError::Csv(format!(
                    "row {i} has {} fields, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push_row(vec![1.0 / 3.0, -2.5e-17, 6.02214076e23]);
        t.push_row(vec![0.1 + 0.2, f64::MIN_POSITIVE, 215.0]);
        let text = t.to_csv();
        let back = Table::parse_csv(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn single_row_gives_two_lines() {
        let mut t = Table::new(&["x"]);
        t.push_row(vec![42.0]);
        assert_eq!(t.to_csv().lines().count(), 2);
    }

    #[test]
    fn empty_table_refuses_to_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let t = Table::new(&["x"]);
        let err = t.write_csv(&path).unwrap_err();
        assert!(matches!(err, CliError::EmptyTable(_)));
        assert!(!path.exists(), "no file should be created");
    }

    #[test]
    fn column_lookup_by_name() {
        let mut t = Table::new(&["cycle", "peak"]);
        t.push_row(vec![0.0, 10.0]);
        t.push_row(vec![1.0, 11.0]);
        assert_eq!(t.column("peak").unwrap(), vec![10.0, 11.0]);
        assert!(t.column("missing").is_none());
    }
}
