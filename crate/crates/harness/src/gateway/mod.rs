//! Uniform access to model backends with an append-only exchange log.

mod account;
mod live;
mod mock;
mod replay;

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::{Condvar, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use arcbench_core::prompt::RenderedPrompt;
use arcbench_core::TemplateId;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use account::{account, whitespace_tokens, PriceTable, Prices};
pub use live::{LiveBackend, LiveConfig, API_KEY_VAR};
pub use mock::HeuristicMock;
pub use replay::{read_exchange_log, ReplayBackend, ScriptedBackend};

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("no logged response for request {0}")]
    ReplayMiss(String),
    #[error("no price entry for model `{0}`")]
    UnknownModel(String),
    #[error("exchange log: {0}")]
    Log(#[from] std::io::Error),
    #[error("exchange log line {line}: {source}")]
    LogFormat { line: usize, source: serde_json::Error },
}

/// Generation settings sent with every prompt. The defaults are
/// configuration, not a claim about any published setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
}

fn default_max_tokens() -> u32 {
    2048
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { model: "mock".into(), temperature: 0.0, max_tokens: default_max_tokens() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub template: TemplateId,
    pub prompt: String,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Request {
    pub fn new(prompt: &RenderedPrompt, params: &GenParams) -> Request {
        Request {
            template: prompt.template,
            prompt: prompt.text.clone(),
            model: params.model.clone(),
            temperature: params.temperature,
            max_tokens: params.max_tokens,
        }
    }

    /// SHA-256 over prompt text, model and generation parameters.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for part in [self.prompt.as_str(), self.model.as_str(), &self.temperature.to_string(), &self.max_tokens.to_string()] {
            h.update((part.len() as u64).to_le_bytes());
            h.update(part.as_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub request_hash: String,
    pub request: Request,
    pub response: String,
    /// Unix milliseconds.
    pub started_ms: u64,
    pub finished_ms: u64,
}

/// A source of completions.
pub trait Backend: Send + Sync {
    fn complete(&self, request: &Request, hash: &str) -> Result<String, GatewayError>;

    fn name(&self) -> &'static str;
}

struct Permits {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Permits {
    fn acquire(&self) -> PermitGuard<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.cv.wait(free).unwrap();
        }
        *free -= 1;
        PermitGuard(self)
    }
}

struct PermitGuard<'a>(&'a Permits);

impl Drop for PermitGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap() += 1;
        self.0.cv.notify_one();
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

/// Shared front door to one backend. Every completed call is appended to
/// the exchange log before the caller sees the response.
pub struct Gateway {
    backend: Box<dyn Backend>,
    log: Option<Mutex<File>>,
    permits: Permits,
    calls: Mutex<u64>,
}

impl Gateway {
    pub fn new(backend: Box<dyn Backend>) -> Gateway {
        Gateway::with_limit(backend, 4)
    }

    /// At most `in_flight` concurrent backend calls.
    pub fn with_limit(backend: Box<dyn Backend>, in_flight: usize) -> Gateway {
        Gateway { backend, log: None, permits: Permits { free: Mutex::new(in_flight.max(1)), cv: Condvar::new() }, calls: Mutex::new(0) }
    }

    /// Appends exchanges to `path`, creating it if needed.
    pub fn log_to(mut self, path: &Path) -> Result<Gateway, GatewayError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        self.log = Some(Mutex::new(OpenOptions::new().create(true).append(true).open(path)?));
        Ok(self)
    }

    pub fn backend_name(&self) -> &'static str {
        self.backend.name()
    }

    /// Completed calls so far.
    pub fn call_count(&self) -> u64 {
        *self.calls.lock().unwrap()
    }

    pub fn complete(&self, prompt: &RenderedPrompt, params: &GenParams) -> Result<Exchange, GatewayError> {
        let request = Request::new(prompt, params);
        let request_hash = request.hash();
        let started_ms = now_ms();
        let response = {
            let _permit = self.permits.acquire();
            self.backend.complete(&request, &request_hash)?
        };
        let exchange = Exchange { request_hash, request, response, started_ms, finished_ms: now_ms() };
        if let Some(log) = &self.log {
            let mut line = serde_json::to_string(&exchange).expect("exchange serializes");
            line.push('\n');
            let mut file = log.lock().unwrap();
            file.write_all(line.as_bytes())?;
            file.flush()?;
        }
        *self.calls.lock().unwrap() += 1;
        Ok(exchange)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use arcbench_core::prompt::render;

    #[test]
    fn hash_covers_parameters() {
        let p = render(TemplateId::CotOneShotExample, &[("one_shot_data", "x")]).unwrap();
        let base = Request::new(&p, &GenParams::default());
        let mut other = base.clone();
        other.temperature = 0.5;
        assert_ne!(base.hash(), other.hash());
        let mut other = base.clone();
        other.model = "m2".into();
        assert_ne!(base.hash(), other.hash());
        assert_eq!(base.hash(), Request::new(&p, &GenParams::default()).hash());
    }
}
