//! On-disk completion fixtures: `fixtures/<template_id>/<key>.json`.
//!
//! The key is a digest of the request, so replaying the same request always
//! finds the same recorded completion. Writes go through a temp file and
//! rename, so concurrent recorders never interleave partial files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CompletionRequest, ExpectedFormat, GatewayError};

/// Deterministic 256-bit digest of (template_id, canonicalized bindings,
/// expected_format), hex encoded. Insensitive to binding insertion order;
/// the provider-specific model hint is deliberately excluded so fixtures
/// stay provider-agnostic.
pub fn fixture_key(request: &CompletionRequest) -> String {
    let canonical = serde_json::json!({
        "template_id": request.template_id,
        "bindings": request.bindings,
        "expected_format": request.expected_format,
    });
    let mut hasher = Sha256::new();
    hasher.update(canonical.to_string().as_bytes());
    hex::encode(hasher.finalize())
}

/// The inputs the key is derived from, stored alongside the completion so a
/// fixture is self-describing and tamper-evident.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DigestInputs {
    pub template_id: String,
    pub bindings: BTreeMap<String, String>,
    pub expected_format: ExpectedFormat,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureFile {
    pub request_digest_inputs: DigestInputs,
    pub raw_text: String,
    pub recorded_at: String,
}

#[derive(Debug, Clone)]
pub struct FixtureStore {
    root: PathBuf,
}

impl FixtureStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        FixtureStore { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, template_id: &str, key: &str) -> PathBuf {
        self.root.join(template_id).join(format!("{key}.json"))
    }

    /// Loads the fixture for `key`, verifying that the stored digest inputs
    /// re-derive the key (i.e. the file was not edited by hand).
    pub fn load(&self, template_id: &str, key: &str) -> Result<Option<FixtureFile>, GatewayError> {
        let path = self.path_for(template_id, key);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(GatewayError::FixtureIo { path: path.display().to_string(), source: e }),
        };
        let fixture: FixtureFile = serde_json::from_str(&text).map_err(|e| {
            GatewayError::CorruptFixture {
                path: path.display().to_string(),
                reason: e.to_string(),
            }
        })?;
        let rederived = fixture_key(&CompletionRequest {
            template_id: fixture.request_digest_inputs.template_id.clone(),
            bindings: fixture.request_digest_inputs.bindings.clone(),
            expected_format: fixture.request_digest_inputs.expected_format,
            model_hint: String::new(),
        });
        if rederived != key {
            return Err(GatewayError::CorruptFixture {
                path: path.display().to_string(),
                reason: format!("stored inputs digest to '{rederived}', not the file key"),
            });
        }
        Ok(Some(fixture))
    }

    pub fn exists(&self, template_id: &str, key: &str) -> bool {
        self.path_for(template_id, key).is_file()
    }

    /// Persists a completion under its request key. Never overwrites an
    /// existing fixture unless `force` is set.
    pub fn store(
        &self,
        request: &CompletionRequest,
        raw_text: &str,
        recorded_at: &str,
        force: bool,
    ) -> Result<PathBuf, GatewayError> {
        let key = fixture_key(request);
        let path = self.path_for(&request.template_id, &key);
        if path.exists() && !force {
            return Err(GatewayError::FixtureExists { key, path: path.display().to_string() });
        }
        let fixture = FixtureFile {
            request_digest_inputs: DigestInputs {
                template_id: request.template_id.clone(),
                bindings: request.bindings.clone(),
                expected_format: request.expected_format,
            },
            raw_text: raw_text.to_string(),
            recorded_at: recorded_at.to_string(),
        };
        let dir = path.parent().expect("fixture path has a parent");
        fs::create_dir_all(dir)
            .map_err(|e| GatewayError::FixtureIo { path: dir.display().to_string(), source: e })?;
        let mut text = serde_json::to_string_pretty(&fixture).expect("fixture serializes");
        text.push('\n');

        // temp file + rename keeps concurrent per-key writes atomic
        let tmp = dir.join(format!(".{key}.tmp{}", std::process::id()));
        fs::write(&tmp, text)
            .map_err(|e| GatewayError::FixtureIo { path: tmp.display().to_string(), source: e })?;
        fs::rename(&tmp, &path)
            .map_err(|e| GatewayError::FixtureIo { path: path.display().to_string(), source: e })?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(bindings: &[(&str, &str)]) -> CompletionRequest {
        CompletionRequest {
            template_id: "classify.v1".into(),
            bindings: bindings.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            expected_format: ExpectedFormat::Json,
            model_hint: "whatever".into(),
        }
    }

    #[test]
    fn key_ignores_binding_insertion_order() {
        let mut forward = BTreeMap::new();
        forward.insert("a".to_string(), "1".to_string());
        forward.insert("b".to_string(), "2".to_string());
        let mut reverse = BTreeMap::new();
        reverse.insert("b".to_string(), "2".to_string());
        reverse.insert("a".to_string(), "1".to_string());
        let fwd = CompletionRequest {
            template_id: "t".into(),
            bindings: forward,
            expected_format: ExpectedFormat::Json,
            model_hint: "x".into(),
        };
        let rev = CompletionRequest { bindings: reverse, ..fwd.clone() };
        assert_eq!(fixture_key(&fwd), fixture_key(&rev));
    }

    #[test]
    fn key_is_sensitive_to_single_character_changes() {
        let a = request(&[("report_title", "Crash"), ("sentences", "0: x")]);
        let b = request(&[("report_title", "Crash"), ("sentences", "0: y")]);
        assert_ne!(fixture_key(&a), fixture_key(&b));
    }

    #[test]
    fn key_ignores_model_hint() {
        let a = request(&[("k", "v")]);
        let b = CompletionRequest { model_hint: "other-model".into(), ..a.clone() };
        assert_eq!(fixture_key(&a), fixture_key(&b));
    }

    #[test]
    fn store_then_load_round_trips_and_checks_integrity() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::new(dir.path());
        let req = request(&[("k", "v")]);
        let key = fixture_key(&req);
        store.store(&req, "answer", "0", false).unwrap();
        let loaded = store.load(&req.template_id, &key).unwrap().unwrap();
        assert_eq!(loaded.raw_text, "answer");

        // a second store without force must refuse to overwrite
        let err = store.store(&req, "other", "0", false).unwrap_err();
        assert!(matches!(err, GatewayError::FixtureExists { .. }));
        store.store(&req, "other", "0", true).unwrap();
        let forced = store.load(&req.template_id, &key).unwrap().unwrap();
        assert_eq!(forced.raw_text, "other");
    }

    #[test]
    fn tampered_fixture_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::new(dir.path());
        let req = request(&[("k", "v")]);
        let key = fixture_key(&req);
        let path = store.store(&req, "answer", "0", false).unwrap();
        let tampered = std::fs::read_to_string(&path).unwrap().replace("\"v\"", "\"w\"");
        std::fs::write(&path, tampered).unwrap();
        let err = store.load(&req.template_id, &key).unwrap_err();
        assert!(matches!(err, GatewayError::CorruptFixture { .. }));
    }
}
