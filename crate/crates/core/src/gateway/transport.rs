//! Live completion transport. The provider is abstracted behind one
//! chat-completion POST; tests substitute their own [`Transport`].

use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("transport failure after {attempts} attempts: {reason}")]
    Exhausted { attempts: u32, reason: String },
    #[error("provider response missing completion text: {0}")]
    MalformedResponse(String),
    #[error("missing configuration: {0}")]
    Misconfigured(String),
}

/// One blocking completion call. Implementations must be safe to share
/// across threads; independent requests never interleave state.
pub trait Transport: Send + Sync {
    fn complete(&self, prompt: &str, model_hint: &str) -> Result<String, TransportError>;
}

/// Capped exponential backoff for live calls.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            base_delay: Duration::from_millis(250),
            max_delay: Duration::from_secs(4),
        }
    }
}

impl RetryPolicy {
    fn delay_for(&self, attempt: u32) -> Duration {
        let exp = self.base_delay.saturating_mul(2u32.saturating_pow(attempt));
        exp.min(self.max_delay)
    }
}

/// OpenAI-style chat-completions client over HTTPS.
pub struct HttpTransport {
    agent: ureq::Agent,
    base_url: String,
    api_key: String,
    retry: RetryPolicy,
}

impl HttpTransport {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>) -> Self {
        HttpTransport {
            agent: ureq::Agent::new_with_defaults(),
            base_url: base_url.into(),
            api_key: api_key.into(),
            retry: RetryPolicy::default(),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    /// Builds a transport from `BUGSCRIBE_API_BASE` and `BUGSCRIBE_API_KEY`.
    pub fn from_env() -> Result<Self, TransportError> {
        let base = std::env::var("BUGSCRIBE_API_BASE")
            .map_err(|_| TransportError::Misconfigured("BUGSCRIBE_API_BASE is not set".into()))?;
        let key = std::env::var("BUGSCRIBE_API_KEY")
            .map_err(|_| TransportError::Misconfigured("BUGSCRIBE_API_KEY is not set".into()))?;
        Ok(HttpTransport::new(base, key))
    }

    fn call_once(&self, prompt: &str, model_hint: &str) -> Result<String, ureq::Error> {
        let body = serde_json::json!({
            "model": model_hint,
            "messages": [{"role": "user", "content": prompt}],
        });
        let url = format!("{}/v1/chat/completions", self.base_url.trim_end_matches('/'));
        let mut response = self
            .agent
            .post(&url)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .header("Content-Type", "application/json")
            .send(body.to_string())?;
        response.body_mut().read_to_string()
    }
}

fn is_retryable(error: &ureq::Error) -> bool {
    match error {
        ureq::Error::StatusCode(code) => *code == 429 || *code >= 500,
        ureq::Error::Io(_) | ureq::Error::Timeout(_) | ureq::Error::HostNotFound => true,
        _ => false,
    }
}

impl Transport for HttpTransport {
    fn complete(&self, prompt: &str, model_hint: &str) -> Result<String, TransportError> {
        let mut last_error = String::new();
        let attempts = self.retry.max_retries + 1;
        for attempt in 0..attempts {
            match self.call_once(prompt, model_hint) {
                Ok(text) => {
                    let value: serde_json::Value = serde_json::from_str(&text)
                        .map_err(|e| TransportError::MalformedResponse(e.to_string()))?;
                    return value["choices"][0]["message"]["content"]
                        .as_str()
                        .map(str::to_string)
                        .ok_or_else(|| TransportError::MalformedResponse(text.clone()));
                }
                Err(e) => {
                    last_error = e.to_string();
                    if attempt + 1 < attempts && is_retryable(&e) {
                        std::thread::sleep(self.retry.delay_for(attempt));
                        continue;
                    }
                    break;
                }
            }
        }
        Err(TransportError::Exhausted { attempts, reason: last_error })
    }
}
