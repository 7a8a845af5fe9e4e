use std::collections::{HashMap, VecDeque};
use std::path::Path;
use std::sync::Mutex;

use super::{Backend, Exchange, GatewayError, Request};

pub fn read_exchange_log(path: &Path) -> Result<Vec<Exchange>, GatewayError> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| GatewayError::LogFormat { line: i + 1, source }))
        .collect()
}

/// Serves logged responses by request hash. Repeated identical requests
/// receive the logged responses in their original order.
pub struct ReplayBackend {
    queues: Mutex<HashMap<String, VecDeque<String>>>,
}

impl ReplayBackend {
    pub fn from_exchanges(exchanges: impl IntoIterator<Item = Exchange>) -> ReplayBackend {
        let mut queues: HashMap<String, VecDeque<String>> = HashMap::new();
        for e in exchanges {
            queues.entry(e.request_hash).or_default().push_back(e.response);
        }
        ReplayBackend { queues: Mutex::new(queues) }
    }

    pub fn from_log(path: &Path) -> Result<ReplayBackend, GatewayError> {
        Ok(ReplayBackend::from_exchanges(read_exchange_log(path)?))
    }

    /// Logged responses not yet served.
    pub fn remaining(&self) -> usize {
        self.queues.lock().unwrap().values().map(VecDeque::len).sum()
    }
}

impl Backend for ReplayBackend {
    fn complete(&self, _request: &Request, hash: &str) -> Result<String, GatewayError> {
        self.queues
            .lock()
            .unwrap()
            .get_mut(hash)
            .and_then(VecDeque::pop_front)
            .ok_or_else(|| GatewayError::ReplayMiss(hash.to_string()))
    }

    fn name(&self) -> &'static str {
        "replay"
    }
}

/// Returns queued responses in order, whatever the request.
pub struct ScriptedBackend {
    queue: Mutex<VecDeque<String>>,
    seen: Mutex<Vec<Request>>,
}

impl ScriptedBackend {
    pub fn new<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> ScriptedBackend {
        ScriptedBackend { queue: Mutex::new(responses.into_iter().map(Into::into).collect()), seen: Mutex::new(Vec::new()) }
    }

    /// Requests received so far.
    pub fn requests(&self) -> Vec<Request> {
        self.seen.lock().unwrap().clone()
    }
}

impl Backend for ScriptedBackend {
    fn complete(&self, request: &Request, _hash: &str) -> Result<String, GatewayError> {
        self.seen.lock().unwrap().push(request.clone());
        self.queue.lock().unwrap().pop_front().ok_or_else(|| GatewayError::BackendUnavailable("script exhausted".into()))
    }

    fn name(&self) -> &'static str {
        "scripted"
    }
}

impl<B: Backend + ?Sized> Backend for std::sync::Arc<B> {
    fn complete(&self, request: &Request, hash: &str) -> Result<String, GatewayError> {
        (**self).complete(request, hash)
    }

    fn name(&self) -> &'static str {
        (**self).name()
    }
}
