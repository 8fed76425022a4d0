//! In-memory CSV tables and the per-command report.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::csv::{fmt_float, write_line};
use crate::error::{Error, Result};

/// One CSV field.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Cell::Bool(b) => Some(*b),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Float(x) => fmt_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

/// Header plus rows of equal width.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Cells of the named column.
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Numeric column; non-numeric cells become `NaN`.
    pub fn floats(&self, name: &str) -> Option<Vec<f64>> {
        Some(self.column(name)?.into_iter().map(|c| c.as_f64().unwrap_or(f64::NAN)).collect())
    }

    /// All `Bool` cells of the `pass` column are true; vacuous without one.
    pub fn all_pass(&self) -> bool {
        self.column("pass")
            .map(|c| c.iter().all(|cell| cell.as_bool() != Some(false)))
            .unwrap_or(true)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write_line(w, &self.header)?;
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::render).collect();
            write_line(w, &fields)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

/// Writes a table to `path`, creating parent directories.
pub fn write_csv(table: &CsvTable, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    table.write_to(&mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Output of one experiment command.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    /// `(file name, table)` pairs.
    pub tables: Vec<(String, CsvTable)>,
    /// Human-readable summary lines.
    pub notes: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            pass: true,
            ..Self::default()
        }
    }

    pub fn table(&self, file: &str) -> Option<&CsvTable> {
        self.tables.iter().find(|(f, _)| f == file).map(|(_, t)| t)
    }

    /// Adds a table; its `pass` column feeds the overall flag.
    pub fn add_table(&mut self, file: impl Into<String>, table: CsvTable) {
        self.pass &= table.all_pass();
        self.tables.push((file.into(), table));
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Writes every table under `dir` and returns the written paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        self.tables
            .iter()
            .map(|(file, table)| {
                let path = dir.join(file);
                write_csv(table, &path)?;
                Ok(path)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_roundtrip() {
        let mut t = CsvTable::new(&["a", "b", "pass"]);
        t.push(vec![1.5.into(), Cell::Empty, true.into()]);
        t.push(vec![(-0.0).into(), "x".into(), false.into()]);
        assert_eq!(t.to_csv_string(), "a,b,pass\n1.5000000000000000e0,,true\n0,x,false\n");
        assert!(!t.all_pass());
        assert_eq!(t.floats("a").unwrap()[0], 1.5);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/t.csv");
        write_csv(&t, &p).unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), t.to_csv_string());
    }

    #[test]
    #[should_panic]
    fn ragged_rows_panic() {
        CsvTable::new(&["a"]).push(vec![]);
    }
}
