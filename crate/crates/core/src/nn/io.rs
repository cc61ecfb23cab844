//! Versioned JSON model files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{AutoencoderModel, Dense};
use crate::data::FeatureSchema;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "aerial-autoencoder";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    schema_hash: String,
    schema: FeatureSchema,
    layer_dims: Vec<usize>,
    layers: Vec<Dense>,
}

impl AutoencoderModel {
    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            schema_hash: self.schema().hash(),
            schema: self.schema().clone(),
            layer_dims: self.layer_dims().to_vec(),
            layers: self.layers().to_vec(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(json)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::Config(format!(
                "unsupported model file {} v{}",
                file.format, file.version
            )));
        }
        if file.schema.hash() != file.schema_hash {
            return Err(Error::SchemaMismatch("schema hash does not match schema".into()));
        }
        AutoencoderModel::from_parts(file.schema, file.layer_dims, file.layers)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        AutoencoderModel::from_json(&json)
    }
}
