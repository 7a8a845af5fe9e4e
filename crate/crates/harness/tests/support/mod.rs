#![allow(dead_code)]

use std::sync::Arc;

use arcbench_core::task::{ExamplePair, TaskSource};
use arcbench_core::{Grid, Task};
use arcbench_harness::gateway::{Gateway, GenParams, ScriptedBackend};

pub fn grid<const W: usize>(rows: &[[u8; W]]) -> Grid {
    Grid::from_rows(rows).unwrap()
}

pub fn pair(input: Grid, output: Grid) -> ExamplePair {
    ExamplePair { input, output }
}

/// Recolor every 1 to 2; size-preserving, one object per grid.
pub fn recolor_task(id: &str) -> Task {
    Task {
        id: id.into(),
        train: vec![
            pair(grid(&[[1, 0, 0], [0, 0, 0], [0, 0, 0]]), grid(&[[2, 0, 0], [0, 0, 0], [0, 0, 0]])),
            pair(grid(&[[0, 0, 0], [0, 1, 1], [0, 0, 0]]), grid(&[[0, 0, 0], [0, 2, 2], [0, 0, 0]])),
        ],
        test: vec![pair(grid(&[[0, 0, 0], [0, 0, 0], [1, 1, 0]]), grid(&[[0, 0, 0], [0, 0, 0], [2, 2, 0]]))],
        source: TaskSource::ArcTrain,
        category: None,
    }
}

pub fn scripted<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> (Arc<ScriptedBackend>, Gateway) {
    let backend = Arc::new(ScriptedBackend::new(responses));
    let gateway = Gateway::new(Box::new(backend.clone()));
    (backend, gateway)
}

pub fn params() -> GenParams {
    GenParams::default()
}

/// Answers with a function of the request; handy when responses depend
/// on which grid the prompt asks about.
pub struct FnBackend<F>(pub F);

impl<F: Fn(&arcbench_harness::gateway::Request) -> String + Send + Sync> arcbench_harness::gateway::Backend for FnBackend<F> {
    fn complete(&self, request: &arcbench_harness::gateway::Request, _hash: &str) -> Result<String, arcbench_harness::gateway::GatewayError> {
        Ok((self.0)(request))
    }

    fn name(&self) -> &'static str {
        "fn"
    }
}
