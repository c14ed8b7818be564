//! Versioned JSON model files.

use serde::{Deserialize, Serialize};
use spikepair_core::classify::TrainedModel;
use spikepair_core::Method;

pub const FORMAT: &str = "spikepair-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    /// Method that selected the features.
    pub selection_method: Method,
    pub spike_threshold: u32,
    /// Days the model was trained on.
    pub train_days: usize,
    pub model: TrainedModel,
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model file: expected format {FORMAT:?} version {VERSION}, found {format:?} version {version}")]
    Version { format: String, version: u32 },
}

impl ModelFile {
    pub fn new(selection_method: Method, spike_threshold: u32, train_days: usize, model: TrainedModel) -> Self {
        ModelFile { format: FORMAT.into(), version: VERSION, selection_method, spike_threshold, train_days, model }
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        #[derive(Deserialize)]
        struct Header {
            format: String,
            version: u32,
        }
        let h: Header = serde_json::from_str(text)?;
        if h.format != FORMAT || h.version != VERSION {
            return Err(ModelError::Version { format: h.format, version: h.version });
        }
        Ok(serde_json::from_str(text)?)
    }
}
