//! Equal-frequency discretization of numeric columns.
//!
//! The lower edge of bin `b` is the order statistic at 0-based rank
//! `ceil(b * n / bins)`. Cut values that coincide (heavy duplicates) or that
//! equal the column minimum are dropped, so a column can end up with fewer
//! bins than requested but never with an empty one. Intervals are right-open
//! except the last, which is closed at the observed maximum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 10;

/// Cut points for one numeric column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnBins {
    pub column: String,
    pub min: f64,
    pub max: f64,
    /// Interior cut points, strictly increasing, each in `(min, max]`.
    pub cuts: Vec<f64>,
}

impl ColumnBins {
    pub fn bin_count(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Index of the bin holding `value`. Values outside the observed range
    /// fall into the first or last bin.
    pub fn assign(&self, value: f64) -> usize {
        self.cuts.partition_point(|&c| c <= value)
    }

    /// Interval label for bin `b`, e.g. `[1,6)` or `[6,10]` for the last.
    pub fn label(&self, b: usize) -> String {
        let lo = if b == 0 { self.min } else { self.cuts[b - 1] };
        if b == self.cuts.len() {
            format!("[{lo},{}]", self.max)
        } else {
            format!("[{lo},{})", self.cuts[b])
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.bin_count()).map(|b| self.label(b)).collect()
    }
}

/// Binning for every discretized column of a table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BinningSpec {
    pub bins: usize,
    pub columns: Vec<ColumnBins>,
}

impl BinningSpec {
    pub fn column(&self, name: &str) -> Option<&ColumnBins> {
        self.columns.iter().find(|c| c.column == name)
    }
}

/// Computes equal-frequency cut points for `values` and the bin index of
/// every value.
pub fn equal_frequency_bin(
    column: &str,
    values: &[f64],
    bins: usize,
) -> Result<(ColumnBins, Vec<usize>)> {
    if bins < 2 {
        return Err(Error::Binning(format!("bins must be >= 2, got {bins}")));
    }
    let bad: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_finite())
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        return Err(Error::NonFinite {
            column: column.to_string(),
            rows: bad,
        });
    }
    if values.is_empty() {
        return Err(Error::Binning(format!("column {column} has no values")));
    }

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let min = sorted[0];
    let max = sorted[n - 1];

    let mut cuts: Vec<f64> = Vec::with_capacity(bins - 1);
    for b in 1..bins {
        let rank = (b * n).div_ceil(bins);
        if rank >= n {
            continue;
        }
        let c = sorted[rank];
        if c > min && cuts.last().map_or(true, |&last| c > last) {
            cuts.push(c);
        }
    }
    if cuts.len() + 1 < bins {
        log::warn!(
            "column {column}: only {} distinct equal-frequency bins (requested {bins})",
            cuts.len() + 1
        );
    }

    let spec = ColumnBins {
        column: column.to_string(),
        min,
        max,
        cuts,
    };
    let assignment = values.iter().map(|&v| spec.assign(v)).collect();
    Ok((spec, assignment))
}
