//! Per-attempt evaluation records and human process annotations.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{grids_equal, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Cot,
    Ltm,
    Tot,
    Dsl,
    Understanding,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::Cot => "cot",
            Pipeline::Ltm => "ltm",
            Pipeline::Tot => "tot",
            Pipeline::Dsl => "dsl",
            Pipeline::Understanding => "understanding",
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Extra information shown to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Condition {
    #[serde(default)]
    pub with_test_output: bool,
    #[serde(default)]
    pub with_human_description: bool,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition { with_test_output: false, with_human_description: false },
        Condition { with_test_output: true, with_human_description: false },
        Condition { with_test_output: false, with_human_description: true },
        Condition { with_test_output: true, with_human_description: true },
    ];

    /// Short label, e.g. `+output+desc`, or `plain`.
    pub fn label(self) -> String {
        match (self.with_test_output, self.with_human_description) {
            (false, false) => "plain".into(),
            (true, false) => "+output".into(),
            (false, true) => "+desc".into(),
            (true, true) => "+output+desc".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub task_id: String,
    pub iteration: u32,
    pub pipeline: Pipeline,
    #[serde(default)]
    pub condition: Condition,
    pub predicted: Option<Grid>,
    pub result_correct: bool,
    /// Human judgment of the stated process; never set automatically.
    #[serde(default)]
    pub process_correct: Option<bool>,
    /// Why no prediction was produced, when none was.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    /// Sequence length, for DSL runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

impl EvalRecord {
    /// Scores `predicted` against `target`. `result_correct` is true only
    /// when a prediction exists and equals the target.
    pub fn scored(
        task_id: impl Into<String>,
        iteration: u32,
        pipeline: Pipeline,
        condition: Condition,
        predicted: Option<Grid>,
        target: &Grid,
    ) -> EvalRecord {
        let result_correct = predicted.as_ref().is_some_and(|p| grids_equal(p, target));
        EvalRecord {
            task_id: task_id.into(),
            iteration,
            pipeline,
            condition,
            predicted,
            result_correct,
            process_correct: None,
            failure: None,
            steps: None,
        }
    }

    pub fn with_failure(mut self, reason: impl Into<String>) -> EvalRecord {
        self.failure = Some(reason.into());
        self
    }

    pub fn with_steps(mut self, steps: usize) -> EvalRecord {
        self.steps = Some(steps);
        self
    }

    /// Counted toward the headline figure: both result and process correct.
    pub fn fully_correct(&self) -> bool {
        self.result_correct && self.process_correct == Some(true)
    }

    pub fn key(&self) -> RecordKey {
        RecordKey { task_id: self.task_id.clone(), iteration: self.iteration, pipeline: self.pipeline, condition: self.condition }
    }
}

/// Identity of one attempt; a record log holds at most one record per key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RecordKey {
    pub task_id: String,
    pub iteration: u32,
    pub pipeline: Pipeline,
    pub condition: Condition,
}

/// One line of an annotation file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub task_id: String,
    pub iteration: u32,
    pub process_correct: bool,
    #[serde(default)]
    pub note: Option<String>,
    /// Restricts the annotation to one pipeline when several share a task.
    #[serde(default)]
    pub pipeline: Option<Pipeline>,
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("annotation for {task_id} iteration {iteration} matches no record")]
    Unmatched { task_id: String, iteration: u32 },
}

fn parse_lines<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>, RecordError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| RecordError::Json { line: i + 1, source }))
        .collect()
}

pub fn parse_records(text: &str) -> Result<Vec<EvalRecord>, RecordError> {
    parse_lines(text)
}

pub fn parse_annotations(text: &str) -> Result<Vec<Annotation>, RecordError> {
    parse_lines(text)
}

pub fn records_to_jsonl(records: &[EvalRecord]) -> String {
    records.iter().map(|r| serde_json::to_string(r).expect("record serializes") + "\n").collect()
}

/// Copies `process_correct` from annotations onto matching records.
/// Returns the number of records updated.
pub fn apply_annotations(records: &mut [EvalRecord], annotations: &[Annotation]) -> Result<usize, RecordError> {
    let mut index: HashMap<(&str, u32), Vec<usize>> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        index.entry((r.task_id.as_str(), r.iteration)).or_default().push(i);
    }
    let mut updates = Vec::new();
    for a in annotations {
        let hits: Vec<usize> = index
            .get(&(a.task_id.as_str(), a.iteration))
            .into_iter()
            .flatten()
            .copied()
            .filter(|&i| a.pipeline.is_none_or(|p| records[i].pipeline == p))
            .collect();
        if hits.is_empty() {
            return Err(RecordError::Unmatched { task_id: a.task_id.clone(), iteration: a.iteration });
        }
        updates.extend(hits.into_iter().map(|i| (i, a.process_correct)));
    }
    let count = updates.len();
    for (i, value) in updates {
        records[i].process_correct = Some(value);
    }
    Ok(count)
}
