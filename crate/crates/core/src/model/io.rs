//! Canonical JSON document for the execution model.
//!
//! Screens are keyed by sorted id and interactions are sorted by id, so two
//! equal models serialize to byte-identical documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ExecutionModel, Interaction, ModelError, Screen, ScreenId};

pub const MODEL_SCHEMA: &str = "bugscribe-model/1";

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    schema: String,
    app_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_screen: Option<ScreenId>,
    screens: BTreeMap<ScreenId, Screen>,
    interactions: Vec<Interaction>,
}

/// Canonical JSON text for the model. Running it twice on the same model is
/// byte-identical, and byte equality of documents implies model equality.
pub fn serialize_model(model: &ExecutionModel) -> String {
    let document = ModelDocument {
        schema: MODEL_SCHEMA.to_string(),
        app_id: model.app_id().to_string(),
        initial_screen: model.initial_screen().cloned(),
        screens: model.screens().clone(),
        interactions: model.interactions().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&document).expect("model serializes");
    text.push('\n');
    text
}

/// Parses and fully re-validates a model document. Parse errors carry a
/// JSON-pointer-style location.
pub fn deserialize_model(text: &str) -> Result<ExecutionModel, ModelError> {
    let mut deserializer = serde_json::Deserializer::from_str(text);
    let document: ModelDocument =
        serde_path_to_error::deserialize(&mut deserializer).map_err(|e| ModelError::Parse {
            path: format!("/{}", e.path().to_string().replace('.', "/")),
            reason: e.inner().to_string(),
        })?;
    if document.schema != MODEL_SCHEMA {
        return Err(ModelError::UnsupportedSchema(document.schema));
    }
    ExecutionModel::from_raw(
        document.app_id,
        document.screens,
        document.interactions,
        document.initial_screen,
    )
}
