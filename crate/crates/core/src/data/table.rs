//! Raw delimiter-separated tables with numeric/categorical column inference.

use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};

/// Whether a column holds numbers or free-form categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// One column of a raw table. `None` cells are missing.
#[derive(Clone, Debug, PartialEq)]
pub struct RawColumn {
    pub name: String,
    pub kind: ColumnKind,
    pub cells: Vec<Option<String>>,
}

impl RawColumn {
    /// Builds a column and infers its kind: numeric when every non-missing
    /// cell parses as a number and at least one cell is present.
    pub fn new(name: impl Into<String>, cells: Vec<Option<String>>) -> Self {
        let mut present = cells.iter().flatten().peekable();
        let kind = if present.peek().is_some() && present.all(|c| c.parse::<f64>().is_ok()) {
            ColumnKind::Numeric
        } else {
            ColumnKind::Categorical
        };
        RawColumn {
            name: name.into(),
            kind,
            cells,
        }
    }

    pub fn categorical(name: impl Into<String>, cells: Vec<Option<String>>) -> Self {
        RawColumn {
            name: name.into(),
            kind: ColumnKind::Categorical,
            cells,
        }
    }

    /// Parsed values of a numeric column, with `None` for missing cells.
    pub fn numbers(&self) -> Vec<Option<f64>> {
        self.cells
            .iter()
            .map(|c| c.as_deref().and_then(|s| s.parse::<f64>().ok()))
            .collect()
    }
}

/// Column-major table as read from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    pub columns: Vec<RawColumn>,
    pub n_rows: usize,
}

impl RawTable {
    pub fn from_columns(columns: Vec<RawColumn>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |c| c.cells.len());
        if let Some(bad) = columns.iter().find(|c| c.cells.len() != n_rows) {
            return Err(Error::Schema(format!(
                "column {} has {} cells, expected {n_rows}",
                bad.name,
                bad.cells.len()
            )));
        }
        Ok(RawTable { columns, n_rows })
    }

    pub fn column(&self, name: &str) -> Option<&RawColumn> {
        self.columns.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CsvOptions {
    pub header: bool,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            header: true,
            delimiter: b',',
        }
    }
}

/// Reads a delimiter-separated file. Empty (whitespace-only) cells are missing.
///
/// Row numbers in errors are 1-based line numbers in the file.
pub fn load_csv(path: impl AsRef<Path>, options: CsvOptions) -> Result<RawTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, options)
}

pub fn read_csv<R: std::io::Read>(reader: R, options: CsvOptions) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(options.delimiter)
        .from_reader(reader);

    let mut names: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<Option<String>>> = Vec::new();
    let mut width: Option<usize> = None;

    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Csv {
            row: e.position().map_or(i + 1, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::RaggedRow {
                    row: line,
                    expected: w,
                    found: record.len(),
                })
            }
            _ => {}
        }
        if options.header && names.is_none() {
            names = Some(record.iter().map(|s| s.trim().to_string()).collect());
            continue;
        }
        rows.push(
            record
                .iter()
                .map(|s| {
                    let s = s.trim();
                    (!s.is_empty()).then(|| s.to_string())
                })
                .collect(),
        );
    }

    let width = width.ok_or_else(|| Error::Empty("file has no rows".into()))?;
    if rows.is_empty() {
        return Err(Error::Empty("file has a header but no data rows".into()));
    }
    let names = names.unwrap_or_else(|| (0..width).map(|j| format!("c{j}")).collect());

    let columns = names
        .into_iter()
        .enumerate()
        .map(|(j, name)| RawColumn::new(name, rows.iter().map(|r| r[j].clone()).collect()))
        .collect();
    RawTable::from_columns(columns)
}
