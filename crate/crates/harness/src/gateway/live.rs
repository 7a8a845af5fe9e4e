use std::time::Duration;

use serde_json::{json, Value};

use super::{Backend, GatewayError, Request};

pub const API_KEY_VAR: &str = "ARCBENCH_API_KEY";

#[derive(Debug, Clone)]
pub struct LiveConfig {
    /// Base URL of an OpenAI-compatible API, without the trailing path.
    pub base_url: String,
    pub api_key: Option<String>,
    /// Retries after the first attempt.
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
    pub timeout: Duration,
}

impl LiveConfig {
    /// Takes the API key from `ARCBENCH_API_KEY`, the only setting read
    /// from the environment.
    pub fn with_env_key(self) -> LiveConfig {
        LiveConfig { api_key: std::env::var(API_KEY_VAR).ok().filter(|k| !k.is_empty()), ..self }
    }
}

impl Default for LiveConfig {
    fn default() -> Self {
        LiveConfig {
            base_url: "https://api.openai.com/v1".into(),
            api_key: None,
            max_retries: 4,
            initial_backoff: Duration::from_millis(500),
            max_backoff: Duration::from_secs(20),
            timeout: Duration::from_secs(120),
        }
    }
}

/// Chat-completions client. Connection failures, 429 and 5xx responses are
/// retried with doubling delays; other failures are returned at once.
pub struct LiveBackend {
    config: LiveConfig,
    client: reqwest::blocking::Client,
}

enum Attempt {
    Done(String),
    Retry(String),
    Fatal(String),
}

impl LiveBackend {
    pub fn new(config: LiveConfig) -> Result<LiveBackend, GatewayError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| GatewayError::BackendUnavailable(e.to_string()))?;
        Ok(LiveBackend { config, client })
    }

    fn attempt(&self, request: &Request) -> Attempt {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let body = json!({
            "model": request.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });
        let mut builder = self.client.post(url).json(&body);
        if let Some(key) = &self.config.api_key {
            builder = builder.bearer_auth(key);
        }
        let response = match builder.send() {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        let status = response.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Attempt::Retry(format!("HTTP {status}"));
        }
        if !status.is_success() {
            return Attempt::Fatal(format!("HTTP {status}: {}", response.text().unwrap_or_default()));
        }
        let value: Value = match response.json() {
            Ok(v) => v,
            Err(e) => return Attempt::Fatal(format!("unreadable response body: {e}")),
        };
        match value.pointer("/choices/0/message/content").and_then(Value::as_str) {
            Some(text) => Attempt::Done(text.to_string()),
            None => Attempt::Fatal("response has no choices[0].message.content".into()),
        }
    }
}

impl Backend for LiveBackend {
    fn complete(&self, request: &Request, _hash: &str) -> Result<String, GatewayError> {
        let mut delay = self.config.initial_backoff;
        let mut last = String::new();
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                log::warn!("retrying after {last} (attempt {attempt})");
                std::thread::sleep(delay);
                delay = (delay * 2).min(self.config.max_backoff);
            }
            match self.attempt(request) {
                Attempt::Done(text) => return Ok(text),
                Attempt::Fatal(reason) => return Err(GatewayError::BackendUnavailable(reason)),
                Attempt::Retry(reason) => last = reason,
            }
        }
        Err(GatewayError::BackendUnavailable(format!("gave up after {} retries: {last}", self.config.max_retries)))
    }

    fn name(&self) -> &'static str {
        "live"
    }
}
