use std::collections::HashMap;
use std::path::Path;

use arcbench_core::dsl::Signature;
use arcbench_core::task::{load_corpus, TaskSource};
use arcbench_core::{DslOp, ExamplePair, Grid, Task};
use serde::Serialize;

use crate::error::ServiceError;

/// Tasks served to participants, by id.
#[derive(Debug, Default)]
pub struct TaskCatalog {
    order: Vec<String>,
    tasks: HashMap<String, Task>,
}

impl TaskCatalog {
    pub fn load(dir: &Path, source: TaskSource) -> Result<TaskCatalog, ServiceError> {
        TaskCatalog::from_tasks(load_corpus(dir, source)?)
    }

    pub fn from_tasks(tasks: Vec<Task>) -> Result<TaskCatalog, ServiceError> {
        let mut catalog = TaskCatalog::default();
        for t in tasks {
            if catalog.tasks.contains_key(&t.id) {
                return Err(ServiceError::DuplicateTask(t.id));
            }
            catalog.order.push(t.id.clone());
            catalog.tasks.insert(t.id.clone(), t);
        }
        catalog.order.sort();
        Ok(catalog)
    }

    pub fn get(&self, id: &str) -> Option<&Task> {
        self.tasks.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Task> {
        self.order.iter().map(|id| &self.tasks[id])
    }
}

#[derive(Debug, Serialize)]
pub struct TaskSummary<'a> {
    pub id: &'a str,
    pub source: TaskSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<&'a str>,
    pub train_pairs: usize,
    /// Whether a solving session can be opened on it.
    pub solvable: bool,
}

impl<'a> TaskSummary<'a> {
    pub fn of(t: &'a Task) -> TaskSummary<'a> {
        TaskSummary { id: &t.id, source: t.source, category: t.category.as_deref(), train_pairs: t.train.len(), solvable: t.primary_test().same_dims() }
    }
}

#[derive(Debug, Serialize)]
pub struct TestInput<'a> {
    pub input: &'a Grid,
}

/// A task with every test output removed.
#[derive(Debug, Serialize)]
pub struct PublicTask<'a> {
    pub id: &'a str,
    pub source: TaskSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<&'a str>,
    pub train: &'a [ExamplePair],
    pub test: Vec<TestInput<'a>>,
}

impl<'a> PublicTask<'a> {
    pub fn of(t: &'a Task) -> PublicTask<'a> {
        PublicTask {
            id: &t.id,
            source: t.source,
            category: t.category.as_deref(),
            train: &t.train,
            test: t.test.iter().map(|p| TestInput { input: &p.input }).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DslEntry {
    pub name: &'static str,
    /// Call template, e.g. `obj_color(state, objectK, color)`.
    pub template: String,
}

pub fn dsl_palette() -> Vec<DslEntry> {
    DslOp::ALL
        .iter()
        .map(|op| {
            let args = match op.signature() {
                Signature::StateOnly => "state",
                Signature::Object => "state, objectK",
                Signature::ObjectColor => "state, objectK, color",
                Signature::Pixel => "state, r, c, color",
                Signature::Segment => "state, r1, c1, r2, c2, color",
            };
            DslEntry { name: op.name(), template: format!("{}({args})", op.name()) }
        })
        .collect()
}
