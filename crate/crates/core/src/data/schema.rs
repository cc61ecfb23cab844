//! Feature schema (one-hot layout), items, and encoded datasets.

use std::collections::HashMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::binning::BinningSpec;
use super::table::{ColumnKind, RawColumn, RawTable};
use crate::error::{Error, Result};

/// Category used for empty cells.
pub const MISSING: &str = "__missing__";

/// A (feature, category) pair: one element of the item universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Item {
    pub feature: usize,
    pub category: usize,
}

impl Item {
    pub fn new(feature: usize, category: usize) -> Self {
        Item { feature, category }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub categories: Vec<String>,
}

/// Ordered features and their category vocabularies.
///
/// Feature `i` occupies `offsets[i]..offsets[i] + c_i` of the flat one-hot
/// vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaRepr")]
pub struct FeatureSchema {
    features: Vec<Feature>,
    offsets: Vec<usize>,
    total_dim: usize,
}

#[derive(Deserialize)]
struct SchemaRepr {
    features: Vec<Feature>,
}

impl TryFrom<SchemaRepr> for FeatureSchema {
    type Error = Error;

    fn try_from(r: SchemaRepr) -> Result<Self> {
        FeatureSchema::new(r.features)
    }
}

impl FeatureSchema {
    pub fn new(features: Vec<Feature>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Schema("schema has no features".into()));
        }
        let mut offsets = Vec::with_capacity(features.len());
        let mut total_dim = 0;
        for f in &features {
            if f.categories.is_empty() {
                return Err(Error::Schema(format!("feature {} has no categories", f.name)));
            }
            let mut seen = std::collections::HashSet::new();
            if let Some(dup) = f.categories.iter().find(|c| !seen.insert(c.as_str())) {
                return Err(Error::Schema(format!(
                    "feature {} repeats category {dup}",
                    f.name
                )));
            }
            offsets.push(total_dim);
            total_dim += f.categories.len();
        }
        Ok(FeatureSchema {
            features,
            offsets,
            total_dim,
        })
    }

    /// Convenience constructor from `(name, [categories])` pairs.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, &[S])]) -> Result<Self> {
        FeatureSchema::new(
            pairs
                .iter()
                .map(|(n, cs)| Feature {
                    name: n.as_ref().to_string(),
                    categories: cs.iter().map(|c| c.as_ref().to_string()).collect(),
                })
                .collect(),
        )
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn category_count(&self, feature: usize) -> usize {
        self.features[feature].categories.len()
    }

    /// Flat index range of a feature's one-hot block.
    pub fn block(&self, feature: usize) -> Range<usize> {
        let start = self.offsets[feature];
        start..start + self.features[feature].categories.len()
    }

    pub fn blocks(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.num_features()).map(move |i| self.block(i))
    }

    pub fn index_of(&self, item: Item) -> usize {
        self.offsets[item.feature] + item.category
    }

    pub fn item_at(&self, index: usize) -> Item {
        let feature = self.offsets.partition_point(|&o| o <= index) - 1;
        Item::new(feature, index - self.offsets[feature])
    }

    /// Every item, in flat-vector order.
    pub fn items(&self) -> impl Iterator<Item = Item> + '_ {
        self.features
            .iter()
            .enumerate()
            .flat_map(|(f, feat)| (0..feat.categories.len()).map(move |c| Item::new(f, c)))
    }

    pub fn contains(&self, item: Item) -> bool {
        item.feature < self.num_features() && item.category < self.category_count(item.feature)
    }

    pub fn check_item(&self, item: Item) -> Result<()> {
        if item.feature >= self.num_features() {
            return Err(Error::UnknownItem(format!("feature index {}", item.feature)));
        }
        let count = self.category_count(item.feature);
        if item.category >= count {
            return Err(Error::CategoryOutOfRange {
                feature: item.feature,
                index: item.category,
                count,
            });
        }
        Ok(())
    }

    /// `feature=category` label.
    pub fn item_label(&self, item: Item) -> String {
        let f = &self.features[item.feature];
        format!("{}={}", f.name, f.categories[item.category])
    }

    /// Parses a `feature=category` label. The split is at the first `=` whose
    /// left side names a feature, so category labels may contain `=`.
    pub fn parse_item(&self, label: &str) -> Result<Item> {
        for (pos, _) in label.match_indices('=') {
            let (name, cat) = (&label[..pos], &label[pos + 1..]);
            if let Some(f) = self.features.iter().position(|f| f.name == name) {
                if let Some(c) = self.features[f].categories.iter().position(|x| x == cat) {
                    return Ok(Item::new(f, c));
                }
            }
        }
        Err(Error::UnknownItem(label.to_string()))
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(&self.features).expect("schema serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }
}

/// Transactions as one category index per feature.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    schema: FeatureSchema,
    rows: Vec<Vec<usize>>,
}

impl Dataset {
    pub fn new(schema: FeatureSchema, rows: Vec<Vec<usize>>) -> Result<Self> {
        for row in &rows {
            check_row(&schema, row)?;
        }
        Ok(Dataset { schema, rows })
    }

    /// Builds the schema and encodes every row of `table`. Numeric columns
    /// listed in `binning` are discretized; other columns use their text.
    pub fn from_table(table: &RawTable, binning: Option<&BinningSpec>) -> Result<Self> {
        let labelled: Vec<Vec<String>> = table
            .columns
            .iter()
            .map(|c| column_labels(c, binning))
            .collect();
        let schema = schema_from_labels(table, &labelled)?;
        let lookup: Vec<HashMap<&str, usize>> = schema
            .features()
            .iter()
            .map(|f| {
                f.categories
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (c.as_str(), i))
                    .collect()
            })
            .collect();
        let rows = (0..table.n_rows)
            .map(|r| {
                labelled
                    .iter()
                    .zip(&lookup)
                    .map(|(col, map)| map[col[r].as_str()])
                    .collect()
            })
            .collect();
        Ok(Dataset { schema, rows })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Whether transaction `row` contains `item`.
    pub fn contains(&self, row: usize, item: Item) -> bool {
        self.rows[row][item.feature] == item.category
    }

    /// One-hot matrix, row-major.
    pub fn encoded(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| encode_row(&self.schema, r).expect("rows validated at construction"))
            .collect()
    }
}

fn check_row(schema: &FeatureSchema, row: &[usize]) -> Result<()> {
    if row.len() != schema.num_features() {
        return Err(Error::Dimension {
            expected: schema.num_features(),
            found: row.len(),
        });
    }
    for (f, &c) in row.iter().enumerate() {
        let count = schema.category_count(f);
        if c >= count {
            return Err(Error::CategoryOutOfRange {
                feature: f,
                index: c,
                count,
            });
        }
    }
    Ok(())
}

fn column_labels(column: &RawColumn, binning: Option<&BinningSpec>) -> Vec<String> {
    let bins = binning
        .filter(|_| column.kind == ColumnKind::Numeric)
        .and_then(|b| b.column(&column.name));
    match bins {
        Some(bins) => column
            .numbers()
            .into_iter()
            .map(|v| match v {
                Some(v) => bins.label(bins.assign(v)),
                None => MISSING.to_string(),
            })
            .collect(),
        None => column
            .cells
            .iter()
            .map(|c| c.clone().unwrap_or_else(|| MISSING.to_string()))
            .collect(),
    }
}

fn schema_from_labels(table: &RawTable, labelled: &[Vec<String>]) -> Result<FeatureSchema> {
    let features = table
        .columns
        .iter()
        .zip(labelled)
        .map(|(col, labels)| {
            let mut categories: Vec<String> = Vec::new();
            let mut seen = std::collections::HashSet::new();
            for l in labels {
                if seen.insert(l.as_str()) {
                    categories.push(l.clone());
                }
            }
            if categories.is_empty() {
                return Err(Error::Schema(format!(
                    "column {} has no observed categories",
                    col.name
                )));
            }
            Ok(Feature {
                name: col.name.clone(),
                categories,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureSchema::new(features)
}

/// Builds the schema for a table. Categories are ordered by first appearance.
pub fn build_schema(table: &RawTable, binning: Option<&BinningSpec>) -> Result<FeatureSchema> {
    let labelled: Vec<Vec<String>> = table
        .columns
        .iter()
        .map(|c| column_labels(c, binning))
        .collect();
    schema_from_labels(table, &labelled)
}

/// One-hot encodes a row of category indices.
pub fn encode_row(schema: &FeatureSchema, row: &[usize]) -> Result<Vec<f64>> {
    check_row(schema, row)?;
    let mut v = vec![0.0; schema.total_dim()];
    for (f, &c) in row.iter().enumerate() {
        v[schema.offsets()[f] + c] = 1.0;
    }
    Ok(v)
}

/// Argmax per feature block; inverse of [`encode_row`].
pub fn decode_vector(schema: &FeatureSchema, v: &[f64]) -> Result<Vec<usize>> {
    if v.len() != schema.total_dim() {
        return Err(Error::Dimension {
            expected: schema.total_dim(),
            found: v.len(),
        });
    }
    Ok(schema
        .blocks()
        .map(|b| {
            let block = &v[b];
            let mut best = 0;
            for (i, x) in block.iter().enumerate() {
                if *x > block[best] {
                    best = i;
                }
            }
            best
        })
        .collect())
}
