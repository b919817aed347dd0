//! Versioned JSON model files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{GpModel, ModelParts};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u64,
    #[serde(flatten)]
    parts: ModelParts,
}

impl GpModel {
    pub fn to_json(&self) -> Result<String> {
        let doc = ModelFile {
            schema_version: SCHEMA_VERSION,
            parts: self.parts().clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::CorruptFile(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::CorruptFile(e.to_string()))?;
        check_version(&value)?;
        let doc: ModelFile = serde_json::from_value(value).map_err(|e| Error::CorruptFile(e.to_string()))?;
        GpModel::from_parts(doc.parts).map_err(|e| match e {
            Error::NotPositiveDefinite { .. } | Error::DimensionMismatch { .. } | Error::Domain(_) => {
                Error::CorruptFile(e.to_string())
            }
            other => other,
        })
    }
}

/// Fails with [`Error::SchemaVersionMismatch`] unless `value` carries the
/// current schema version.
pub(crate) fn check_version(value: &Value) -> Result<()> {
    let found = value
        .get("schema_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::CorruptFile("missing schema_version".into()))?;
    if found != SCHEMA_VERSION {
        return Err(Error::SchemaVersionMismatch {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    Ok(())
}

pub fn save_model(model: &GpModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model.to_json()?)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GpModel> {
    GpModel::from_json(&fs::read_to_string(path)?)
}
