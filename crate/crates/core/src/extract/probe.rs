use crate::data::{FeatureSchema, Item};
use crate::error::{Error, Result};
use crate::nn::AutoencoderModel;

/// Anything that maps a test vector to per-feature category probabilities.
pub trait Probe: Sync {
    fn schema(&self) -> &FeatureSchema;
    fn reconstruct(&self, v: &[f64]) -> Result<Vec<f64>>;
}

impl Probe for AutoencoderModel {
    fn schema(&self) -> &FeatureSchema {
        AutoencoderModel::schema(self)
    }

    fn reconstruct(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.forward(v)
    }
}

/// Each feature block filled with `1 / c_i`.
pub fn uniform_vector(schema: &FeatureSchema) -> Vec<f64> {
    let mut v = vec![0.0; schema.total_dim()];
    for block in schema.blocks() {
        let p = 1.0 / block.len() as f64;
        v[block].iter_mut().for_each(|x| *x = p);
    }
    v
}

/// Marks `items` in `v`: the item's entry becomes 1 and its siblings 0.
pub fn mark(schema: &FeatureSchema, v: &mut [f64], items: &[Item]) -> Result<()> {
    if v.len() != schema.total_dim() {
        return Err(Error::Dimension {
            expected: schema.total_dim(),
            found: v.len(),
        });
    }
    for (i, a) in items.iter().enumerate() {
        schema.check_item(*a)?;
        if items[..i].iter().any(|b| b.feature == a.feature) {
            return Err(Error::ConflictingMark(a.feature));
        }
    }
    for item in items {
        v[schema.block(item.feature)].iter_mut().for_each(|x| *x = 0.0);
        v[schema.index_of(*item)] = 1.0;
    }
    Ok(())
}

/// Uniform vector with `items` marked.
pub fn test_vector(schema: &FeatureSchema, items: &[Item]) -> Result<Vec<f64>> {
    let mut v = uniform_vector(schema);
    mark(schema, &mut v, items)?;
    Ok(v)
}
