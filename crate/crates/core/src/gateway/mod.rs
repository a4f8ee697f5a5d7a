//! Provider-agnostic LLM gateway with deterministic record/replay fixtures.
//!
//! In replay mode every completion is served verbatim from the fixture
//! store, so the whole pipeline is a pure function of its inputs and the
//! fixture set, with zero network use. Record mode performs live calls and
//! persists them; live mode calls without persisting.

mod fixture;
mod template;
mod transport;

pub use fixture::{fixture_key, DigestInputs, FixtureFile, FixtureStore};
pub use template::{PromptTemplate, TemplateRegistry, TemplateSection};
pub use transport::{HttpTransport, RetryPolicy, Transport, TransportError};

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("unknown template '{0}'")]
    UnknownTemplate(String),
    #[error("template error: {0}")]
    Template(String),
    #[error("template '{template_id}' has no binding for placeholder '{placeholder}'")]
    MissingPlaceholder { template_id: String, placeholder: String },
    #[error("binding '{placeholder}' does not exist in template '{template_id}'")]
    UnknownPlaceholder { template_id: String, placeholder: String },
    #[error("no fixture for key '{key}' of template '{template_id}' (replay mode)")]
    MissingFixture { template_id: String, key: String },
    #[error("fixture already recorded for key '{key}' at {path}; pass force to overwrite")]
    FixtureExists { key: String, path: String },
    #[error("fixture io error at {path}: {source}")]
    FixtureIo { path: String, source: std::io::Error },
    #[error("corrupt fixture at {path}: {reason}")]
    CorruptFixture { path: String, reason: String },
    #[error("gateway has no transport configured for mode {mode:?}")]
    NoTransport { mode: GatewayMode },
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("completion is not valid JSON after repair: {reason}; raw text: {raw_text:?}")]
    Format { reason: String, raw_text: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GatewayMode {
    Record,
    Replay,
    Live,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpectedFormat {
    Json,
    Text,
}

/// One completion request: a template plus its bindings. The model hint is
/// provider-specific and opaque; it does not affect the fixture key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub template_id: String,
    pub bindings: BTreeMap<String, String>,
    pub expected_format: ExpectedFormat,
    pub model_hint: String,
}

impl CompletionRequest {
    pub fn json(template_id: &str, bindings: BTreeMap<String, String>) -> Self {
        CompletionRequest {
            template_id: template_id.to_string(),
            bindings,
            expected_format: ExpectedFormat::Json,
            model_hint: default_model_hint(),
        }
    }

    pub fn text(template_id: &str, bindings: BTreeMap<String, String>) -> Self {
        CompletionRequest {
            template_id: template_id.to_string(),
            bindings,
            expected_format: ExpectedFormat::Text,
            model_hint: default_model_hint(),
        }
    }
}

fn default_model_hint() -> String {
    std::env::var("BUGSCRIBE_MODEL").unwrap_or_else(|_| "default".to_string())
}

#[derive(Debug, Clone)]
pub struct CompletionResult {
    pub raw_text: String,
    /// Parsed value when the request expected JSON.
    pub parsed: Option<serde_json::Value>,
    pub fixture_hit: bool,
    pub fixture_key: String,
}

/// Running totals of gateway activity, shared across threads. The replay
/// invariant "zero network operations" is asserted against `live_calls`.
#[derive(Debug, Default)]
pub struct CallCounters {
    live_calls: AtomicU64,
    replay_hits: AtomicU64,
    recorded: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterSnapshot {
    pub live_calls: u64,
    pub replay_hits: u64,
    pub recorded: u64,
}

impl CallCounters {
    fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            live_calls: self.live_calls.load(Ordering::Relaxed),
            replay_hits: self.replay_hits.load(Ordering::Relaxed),
            recorded: self.recorded.load(Ordering::Relaxed),
        }
    }
}

/// One completed gateway call, for pipeline traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallRecord {
    pub template_id: String,
    pub fixture_key: String,
    pub fixture_hit: bool,
}

/// Token bucket limiting live/record request rate. Replay is never limited.
struct TokenBucket {
    capacity: f64,
    tokens: f64,
    refill_per_sec: f64,
    last_refill: Instant,
}

impl TokenBucket {
    fn new(requests_per_minute: u32) -> Self {
        let capacity = requests_per_minute.max(1) as f64;
        TokenBucket {
            capacity,
            tokens: capacity,
            refill_per_sec: capacity / 60.0,
            last_refill: Instant::now(),
        }
    }

    fn acquire(&mut self) {
        loop {
            let now = Instant::now();
            let elapsed = now.duration_since(self.last_refill).as_secs_f64();
            self.tokens = (self.tokens + elapsed * self.refill_per_sec).min(self.capacity);
            self.last_refill = now;
            if self.tokens >= 1.0 {
                self.tokens -= 1.0;
                return;
            }
            let wait = (1.0 - self.tokens) / self.refill_per_sec;
            std::thread::sleep(std::time::Duration::from_secs_f64(wait.max(0.01)));
        }
    }
}

/// The completion gateway. Safe for concurrent calls: the fixture store
/// performs per-key atomic writes, counters are atomic, and the rate
/// limiter is internally locked.
pub struct Gateway {
    registry: TemplateRegistry,
    store: FixtureStore,
    mode: GatewayMode,
    transport: Option<Box<dyn Transport>>,
    limiter: Option<Mutex<TokenBucket>>,
    force_record: bool,
    counters: CallCounters,
    call_log: Mutex<Vec<CallRecord>>,
}

impl Gateway {
    /// Replay-only gateway over a fixture directory. Never touches the
    /// network and never writes.
    pub fn replay(fixture_root: impl Into<PathBuf>) -> Self {
        Gateway {
            registry: TemplateRegistry::builtin(),
            store: FixtureStore::new(fixture_root),
            mode: GatewayMode::Replay,
            transport: None,
            limiter: None,
            force_record: false,
            counters: CallCounters::default(),
            call_log: Mutex::new(Vec::new()),
        }
    }

    /// Recording gateway: replays existing fixtures, performs live calls
    /// for missing keys and persists them.
    pub fn record(fixture_root: impl Into<PathBuf>, transport: Box<dyn Transport>) -> Self {
        Gateway { transport: Some(transport), mode: GatewayMode::Record, ..Gateway::replay(fixture_root) }
    }

    /// Live gateway: always calls the provider, never persists.
    pub fn live(fixture_root: impl Into<PathBuf>, transport: Box<dyn Transport>) -> Self {
        Gateway { transport: Some(transport), mode: GatewayMode::Live, ..Gateway::replay(fixture_root) }
    }

    /// Overwrite existing fixtures when recording.
    pub fn with_force_record(mut self, force: bool) -> Self {
        self.force_record = force;
        self
    }

    /// Token-bucket rate limit for live/record calls, in requests/minute.
    pub fn with_rate_limit(mut self, requests_per_minute: u32) -> Self {
        self.limiter = Some(Mutex::new(TokenBucket::new(requests_per_minute)));
        self
    }

    pub fn mode(&self) -> GatewayMode {
        self.mode
    }

    pub fn templates(&self) -> &TemplateRegistry {
        &self.registry
    }

    pub fn fixture_store(&self) -> &FixtureStore {
        &self.store
    }

    pub fn counters(&self) -> CounterSnapshot {
        self.counters.snapshot()
    }

    /// Takes the calls made since the last drain, oldest first.
    pub fn drain_calls(&self) -> Vec<CallRecord> {
        std::mem::take(&mut *self.call_log.lock().expect("call log lock"))
    }

    pub fn render(&self, request: &CompletionRequest) -> Result<String, GatewayError> {
        self.registry.get(&request.template_id)?.render(&request.bindings)
    }

    pub fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, GatewayError> {
        let key = fixture_key(request);
        let result = match self.mode {
            GatewayMode::Replay => self.complete_replay(request, &key)?,
            GatewayMode::Record => {
                if !self.force_record && self.store.exists(&request.template_id, &key) {
                    self.complete_replay(request, &key)?
                } else {
                    let raw_text = self.call_live(request)?;
                    let recorded_at = unix_millis().to_string();
                    self.store.store(request, &raw_text, &recorded_at, self.force_record)?;
                    self.counters.recorded.fetch_add(1, Ordering::Relaxed);
                    self.finish(request, raw_text, false, &key)?
                }
            }
            GatewayMode::Live => {
                let raw_text = self.call_live(request)?;
                self.finish(request, raw_text, false, &key)?
            }
        };
        self.call_log.lock().expect("call log lock").push(CallRecord {
            template_id: request.template_id.clone(),
            fixture_key: key,
            fixture_hit: result.fixture_hit,
        });
        Ok(result)
    }

    fn complete_replay(
        &self,
        request: &CompletionRequest,
        key: &str,
    ) -> Result<CompletionResult, GatewayError> {
        let fixture = self.store.load(&request.template_id, key)?.ok_or_else(|| {
            GatewayError::MissingFixture { template_id: request.template_id.clone(), key: key.to_string() }
        })?;
        self.counters.replay_hits.fetch_add(1, Ordering::Relaxed);
        self.finish(request, fixture.raw_text, true, key)
    }

    fn call_live(&self, request: &CompletionRequest) -> Result<String, GatewayError> {
        let transport = self
            .transport
            .as_ref()
            .ok_or(GatewayError::NoTransport { mode: self.mode })?;
        if let Some(limiter) = &self.limiter {
            limiter.lock().expect("rate limiter lock").acquire();
        }
        let prompt = self.render(request)?;
        self.counters.live_calls.fetch_add(1, Ordering::Relaxed);
        Ok(transport.complete(&prompt, &request.model_hint)?)
    }

    fn finish(
        &self,
        request: &CompletionRequest,
        raw_text: String,
        fixture_hit: bool,
        key: &str,
    ) -> Result<CompletionResult, GatewayError> {
        let parsed = match request.expected_format {
            ExpectedFormat::Text => None,
            ExpectedFormat::Json => Some(parse_json_with_repair(&raw_text)?),
        };
        Ok(CompletionResult { raw_text, parsed, fixture_hit, fixture_key: key.to_string() })
    }
}

fn unix_millis() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// Parses a completion as JSON. Repair is deliberately limited to stripping
/// code fences and trimming leading/trailing prose; anything beyond that is
/// an error carrying the raw text.
pub fn parse_json_with_repair(raw: &str) -> Result<serde_json::Value, GatewayError> {
    let direct = raw.trim();
    if let Ok(value) = serde_json::from_str(direct) {
        return Ok(value);
    }

    if let Some(inner) = extract_fenced_block(direct) {
        if let Ok(value) = serde_json::from_str(inner.trim()) {
            return Ok(value);
        }
    }

    if let Some(slice) = extract_bracketed(direct) {
        if let Ok(value) = serde_json::from_str(slice) {
            return Ok(value);
        }
    }

    Err(GatewayError::Format {
        reason: "no JSON value found after fence-stripping and prose-trimming".into(),
        raw_text: raw.to_string(),
    })
}

fn extract_fenced_block(text: &str) -> Option<&str> {
    let open = text.find("```")?;
    let after_open = &text[open + 3..];
    let content_start = after_open.find('\n')? + 1;
    let body = &after_open[content_start..];
    let close = body.find("```")?;
    Some(&body[..close])
}

fn extract_bracketed(text: &str) -> Option<&str> {
    let open_obj = text.find('{');
    let open_arr = text.find('[');
    let (open, close_char) = match (open_obj, open_arr) {
        (Some(o), Some(a)) if o < a => (o, '}'),
        (Some(o), None) => (o, '}'),
        (_, Some(a)) => (a, ']'),
        (None, None) => return None,
    };
    let close = text.rfind(close_char)?;
    (close > open).then(|| &text[open..=close])
}

#[cfg(test)]
mod tests {
    use super::*;

    struct CannedTransport {
        responses: Mutex<Vec<String>>,
        calls: AtomicU64,
    }

    impl CannedTransport {
        fn new(responses: &[&str]) -> Self {
            CannedTransport {
                responses: Mutex::new(responses.iter().rev().map(|s| s.to_string()).collect()),
                calls: AtomicU64::new(0),
            }
        }
    }

    impl Transport for CannedTransport {
        fn complete(&self, _prompt: &str, _model_hint: &str) -> Result<String, TransportError> {
            self.calls.fetch_add(1, Ordering::Relaxed);
            self.responses
                .lock()
                .unwrap()
                .pop()
                .ok_or_else(|| TransportError::Exhausted { attempts: 1, reason: "script exhausted".into() })
        }
    }

    fn describe_request() -> CompletionRequest {
        let bindings = [
            ("screen_id", "abc"),
            ("activity_name", "MainActivity"),
            ("is_dialog", "false"),
            ("components", "button 'OK'"),
        ];
        CompletionRequest::text(
            "screen-desc.v1",
            bindings.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        )
    }

    #[test]
    fn replay_returns_stored_bytes_verbatim() {
        let dir = tempfile::tempdir().unwrap();
        let req = describe_request();
        FixtureStore::new(dir.path()).store(&req, "A settings screen.", "0", false).unwrap();

        let gateway = Gateway::replay(dir.path());
        let result = gateway.complete(&req).unwrap();
        assert_eq!(result.raw_text, "A settings screen.");
        assert!(result.fixture_hit);
        assert_eq!(gateway.counters().live_calls, 0);
    }

    #[test]
    fn replay_of_unknown_key_names_the_key() {
        let dir = tempfile::tempdir().unwrap();
        let gateway = Gateway::replay(dir.path());
        let req = describe_request();
        let expected_key = fixture_key(&req);
        match gateway.complete(&req).unwrap_err() {
            GatewayError::MissingFixture { key, .. } => assert_eq!(key, expected_key),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn record_then_replay_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let req = describe_request();
        let recorder =
            Gateway::record(dir.path(), Box::new(CannedTransport::new(&["A settings screen."])));
        let recorded = recorder.complete(&req).unwrap();
        assert!(!recorded.fixture_hit);
        assert_eq!(recorder.counters().recorded, 1);

        let replayer = Gateway::replay(dir.path());
        let replayed = replayer.complete(&req).unwrap();
        assert_eq!(replayed.raw_text, recorded.raw_text);
        assert!(replayed.fixture_hit);
    }

    #[test]
    fn record_reuses_an_existing_fixture_without_calling_live() {
        let dir = tempfile::tempdir().unwrap();
        let req = describe_request();
        FixtureStore::new(dir.path()).store(&req, "stored", "0", false).unwrap();

        let transport = CannedTransport::new(&["fresh"]);
        let gateway = Gateway::record(dir.path(), Box::new(transport));
        let result = gateway.complete(&req).unwrap();
        assert_eq!(result.raw_text, "stored");
        assert!(result.fixture_hit);
        assert_eq!(gateway.counters().live_calls, 0);
    }

    #[test]
    fn force_record_overwrites() {
        let dir = tempfile::tempdir().unwrap();
        let req = describe_request();
        FixtureStore::new(dir.path()).store(&req, "stored", "0", false).unwrap();

        let gateway = Gateway::record(dir.path(), Box::new(CannedTransport::new(&["fresh"])))
            .with_force_record(true);
        assert_eq!(gateway.complete(&req).unwrap().raw_text, "fresh");
    }

    #[test]
    fn json_repair_strips_fences_and_prose() {
        let fenced = "```json\n{\"a\": 1}\n```";
        assert_eq!(parse_json_with_repair(fenced).unwrap()["a"], 1);
        let prosed = "Sure, here is the answer:\n{\"a\": 2}\nHope that helps!";
        assert_eq!(parse_json_with_repair(prosed).unwrap()["a"], 2);
        let array = "the result: [1, 2, 3] as requested";
        assert_eq!(parse_json_with_repair(array).unwrap()[2], 3);
    }

    #[test]
    fn json_repair_failure_carries_raw_text() {
        match parse_json_with_repair("not json at all").unwrap_err() {
            GatewayError::Format { raw_text, .. } => assert_eq!(raw_text, "not json at all"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn json_format_error_from_complete_carries_raw_text() {
        let dir = tempfile::tempdir().unwrap();
        let mut req = describe_request();
        req.expected_format = ExpectedFormat::Json;
        FixtureStore::new(dir.path()).store(&req, "plain text, no json", "0", false).unwrap();
        let gateway = Gateway::replay(dir.path());
        assert!(matches!(gateway.complete(&req), Err(GatewayError::Format { .. })));
    }

    #[test]
    fn rate_limited_recording_still_completes_promptly_within_budget() {
        let dir = tempfile::tempdir().unwrap();
        let transport = CannedTransport::new(&["a", "b", "c"]);
        let gateway = Gateway::record(dir.path(), Box::new(transport)).with_rate_limit(6000);
        let started = std::time::Instant::now();
        for i in 0..3 {
            let mut req = describe_request();
            req.bindings.insert("screen_id".into(), format!("screen-{i}"));
            gateway.complete(&req).unwrap();
        }
        assert!(started.elapsed().as_secs_f64() < 2.0);
        assert_eq!(gateway.counters().live_calls, 3);
    }

    #[test]
    fn call_log_records_every_completion() {
        let dir = tempfile::tempdir().unwrap();
        let req = describe_request();
        FixtureStore::new(dir.path()).store(&req, "text", "0", false).unwrap();
        let gateway = Gateway::replay(dir.path());
        gateway.complete(&req).unwrap();
        let calls = gateway.drain_calls();
        assert_eq!(calls.len(), 1);
        assert_eq!(calls[0].template_id, "screen-desc.v1");
        assert!(gateway.drain_calls().is_empty());
    }
}
