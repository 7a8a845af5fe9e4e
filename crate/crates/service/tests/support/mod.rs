#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::sync::Arc;

use arcbench_core::task::{ExamplePair, TaskSource};
use arcbench_core::{Grid, Task};
use arcbench_harness::pipelines::{GenerationRecord, Verdict};
use arcbench_harness::run::GENERATIONS;
use arcbench_service::{router, App, ManualClock, ServiceConfig, TaskCatalog};
use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub fn grid<const W: usize>(rows: &[[u8; W]]) -> Grid {
    Grid::from_rows(rows).unwrap()
}

pub const RECOLOR: &str = "aaaa0001";
pub const RESIZE: &str = "bbbb0002";

/// Recolor 1 to 7. The test target is the only grid anywhere that holds a 7
/// in these positions, so it is easy to spot in a payload.
pub fn recolor_target() -> Grid {
    grid(&[[7, 7, 0], [0, 0, 0], [0, 0, 7]])
}

pub fn tasks() -> Vec<Task> {
    let pair = |i: Grid, o: Grid| ExamplePair { input: i, output: o };
    vec![
        Task {
            id: RECOLOR.into(),
            train: vec![pair(grid(&[[1, 0], [0, 1]]), grid(&[[7, 0], [0, 7]]))],
            test: vec![pair(grid(&[[1, 1, 0], [0, 0, 0], [0, 0, 1]]), recolor_target())],
            source: TaskSource::ArcTrain,
            category: None,
        },
        Task {
            id: RESIZE.into(),
            train: vec![pair(grid(&[[1]]), grid(&[[1, 1]]))],
            test: vec![pair(grid(&[[2]]), grid(&[[2, 2]]))],
            source: TaskSource::ArcTrain,
            category: None,
        },
    ]
}

pub fn generation(task_id: &str, category: &str, n: usize) -> GenerationRecord {
    GenerationRecord {
        id: format!("{task_id}-t0-a{n}"),
        task_id: task_id.into(),
        category: category.into(),
        target_index: 0,
        target_output: grid(&[[5, 5]]),
        candidate_input: grid(&[[n as u8 % 10, 0]]),
        verdict: Verdict::Pending,
        reviewer: None,
        note: None,
        exchange: format!("h{n}"),
        prompt_tokens: 10,
        completion_tokens: 5,
    }
}

/// Writes an experiment directory with `n` pending candidates per category.
pub fn seed_generations(reports: &Path, experiment: &str, categories: &[&str], n: usize) {
    let dir = reports.join(experiment);
    fs::create_dir_all(&dir).unwrap();
    let mut lines = String::new();
    let mut k = 0;
    for c in categories {
        for _ in 0..n {
            lines.push_str(&serde_json::to_string(&generation(RECOLOR, c, k)).unwrap());
            lines.push('\n');
            k += 1;
        }
    }
    fs::write(dir.join(GENERATIONS), lines).unwrap();
}

pub struct Fixture {
    pub root: tempfile::TempDir,
    pub clock: Arc<ManualClock>,
}

impl Fixture {
    pub fn new() -> Fixture {
        Fixture { root: tempfile::tempdir().unwrap(), clock: Arc::new(ManualClock::new(1_000)) }
    }

    pub fn config(&self) -> ServiceConfig {
        ServiceConfig::new(self.root.path().join("tasks"), self.root.path().join("data"), self.root.path().join("reports"))
    }

    pub fn reports(&self) -> std::path::PathBuf {
        self.root.path().join("reports")
    }

    /// A fresh service over the fixture's directories, as after a restart.
    pub fn client(&self) -> Client {
        let app = App::with_tasks(TaskCatalog::from_tasks(tasks()).unwrap(), &self.config(), self.clock.clone()).unwrap();
        Client { router: router(Arc::new(app)), seen: Default::default() }
    }
}

/// Drives the router in-process and keeps every response body.
pub struct Client {
    pub router: Router,
    pub seen: std::sync::Mutex<Vec<Value>>,
}

impl Client {
    pub async fn send(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let req = Request::builder().method(method).uri(uri);
        let req = match body {
            Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
            None => req.body(Body::empty()),
        }
        .unwrap();
        let resp = self.router.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        let value: Value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
        self.seen.lock().unwrap().push(value.clone());
        (status, value)
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.send(Method::GET, uri, None).await
    }

    pub async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.send(Method::POST, uri, Some(body)).await
    }
}

/// Every nested integer matrix in a JSON value.
pub fn matrices(v: &Value, out: &mut Vec<Vec<Vec<u64>>>) {
    match v {
        Value::Array(items) => {
            let rows: Option<Vec<Vec<u64>>> =
                items.iter().map(|r| r.as_array().and_then(|r| r.iter().map(Value::as_u64).collect::<Option<Vec<_>>>())).collect();
            match rows {
                Some(rows) if !rows.is_empty() => out.push(rows),
                _ => items.iter().for_each(|i| matrices(i, out)),
            }
        }
        Value::Object(m) => m.values().for_each(|i| matrices(i, out)),
        _ => {}
    }
}
