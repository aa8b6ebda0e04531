use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits; non-finite values become `nan`, `inf`, `-inf`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn is_non_finite(&self) -> bool {
        matches!(self, Cell::Num(v) if !v.is_finite())
    }
}

/// A rectangular table with a header row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| Cell::Num(v)).collect());
    }

    pub fn non_finite(&self) -> usize {
        self.rows.iter().flatten().filter(|c| c.is_non_finite()).count()
    }
}

/// Writes `table` as CSV with LF line endings, replacing `path` atomically.
/// Returns the number of non-finite cells.
pub fn emit_csv(table: &Table, path: &Path) -> Result<usize> {
    if table.rows.iter().any(|r| r.len() != table.header.len()) {
        return Err(Error::Config(format!("table for {} is not rectangular", path.display())));
    }
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
    }
    write_atomic(path, &buf)?;
    Ok(table.non_finite())
}

/// Temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
