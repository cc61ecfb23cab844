//! Tabular input: CSV loading, discretization, one-hot schema, encoding.

mod binning;
mod schema;
mod table;

use std::path::Path;

pub use binning::{equal_frequency_bin, BinningSpec, ColumnBins, DEFAULT_BINS};
pub use schema::{
    build_schema, decode_vector, encode_row, Dataset, Feature, FeatureSchema, Item, MISSING,
};
pub use table::{load_csv, read_csv, ColumnKind, CsvOptions, RawColumn, RawTable};

use crate::error::{Error, Result};

/// Fits equal-frequency bins for every numeric column of `table`.
/// Missing cells are ignored when computing cut points.
pub fn fit_binning(table: &RawTable, bins: usize) -> Result<BinningSpec> {
    let mut columns = Vec::new();
    for col in table.columns.iter().filter(|c| c.kind == ColumnKind::Numeric) {
        let parsed = col.numbers();
        let present: Vec<(usize, f64)> = parsed
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .collect();
        let values: Vec<f64> = present.iter().map(|&(_, v)| v).collect();
        let (spec, _) = equal_frequency_bin(&col.name, &values, bins).map_err(|e| match e {
            // report table rows, not positions among present values
            Error::NonFinite { column, rows } => Error::NonFinite {
                column,
                rows: rows.into_iter().map(|i| present[i].0).collect(),
            },
            other => other,
        })?;
        columns.push(spec);
    }
    Ok(BinningSpec { bins, columns })
}

#[derive(Clone, Copy, Debug)]
pub struct LoadOptions {
    pub csv: CsvOptions,
    /// Equal-frequency bins for numeric columns; `None` keeps numeric cells
    /// as literal categories.
    pub bins: Option<usize>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            csv: CsvOptions::default(),
            bins: Some(DEFAULT_BINS),
        }
    }
}

/// Loads, discretizes and encodes a CSV file.
pub fn load_dataset(path: impl AsRef<Path>, options: LoadOptions) -> Result<(Dataset, BinningSpec)> {
    let table = load_csv(path, options.csv)?;
    let binning = match options.bins {
        Some(b) => fit_binning(&table, b)?,
        None => BinningSpec::default(),
    };
    let dataset = Dataset::from_table(&table, Some(&binning))?;
    Ok((dataset, binning))
}
