//! Canonical screen identity.
//!
//! A screen is identified by a digest over (activity name, dialog flag,
//! depth-first list of component tuples). Bounds are excluded because they
//! jitter across devices; text-field labels are excluded because they hold
//! transient user input. Structure and stable labels carry identity.

use sha2::{Digest, Sha256};

use super::{ScreenId, UiNode};

/// Depth-first canonical component tuples: (kind, resource_id, label).
///
/// Labels are lowercased and trimmed; a text-field's label is dropped
/// entirely because it reflects whatever was typed when the snapshot was
/// taken.
pub fn canonical_components(hierarchy: &[UiNode]) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    fn walk(node: &UiNode, out: &mut Vec<(String, String, String)>) {
        let c = &node.component;
        let label = if c.kind == "text-field" {
            String::new()
        } else {
            c.label.trim().to_lowercase()
        };
        out.push((c.kind.clone(), c.resource_id.clone(), label));
        for child in &node.children {
            walk(child, out);
        }
    }
    for node in hierarchy {
        walk(node, &mut out);
    }
    out
}

/// Deterministic 256-bit digest of the canonical screen form, hex encoded.
///
/// Equal canonical forms give equal ids; structurally different hierarchies
/// give different ids up to digest collision.
pub fn screen_identity(hierarchy: &[UiNode], activity_name: &str, is_dialog: bool) -> ScreenId {
    let components = canonical_components(hierarchy);
    let canonical = serde_json::json!([activity_name, is_dialog, components]);
    let mut hasher = Sha256::new();
    hasher.update(canonical.to_string().as_bytes());
    ScreenId::new(hex::encode(hasher.finalize()))
}

/// First 12 hex chars of a sha256, used for compact derived ids.
pub(super) fn short_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())[..12].to_string()
}
