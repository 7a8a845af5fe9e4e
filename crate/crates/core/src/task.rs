//! Tasks in the ARC interchange layout and their on-disk corpora.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{validate_grid, Grid, GridViolations};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplePair {
    pub input: Grid,
    pub output: Grid,
}

impl ExamplePair {
    pub fn same_dims(&self) -> bool {
        self.input.dims() == self.output.dims()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskSource {
    ArcTrain,
    ArcEval,
    ConceptArc,
    Augmented,
}

impl TaskSource {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskSource::ArcTrain => "arc-train",
            TaskSource::ArcEval => "arc-eval",
            TaskSource::ConceptArc => "concept-arc",
            TaskSource::Augmented => "augmented",
        }
    }

    fn uses_hex_ids(self) -> bool {
        matches!(self, TaskSource::ArcTrain | TaskSource::ArcEval)
    }
}

impl fmt::Display for TaskSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arc-train" => Ok(TaskSource::ArcTrain),
            "arc-eval" => Ok(TaskSource::ArcEval),
            "concept-arc" => Ok(TaskSource::ConceptArc),
            "augmented" => Ok(TaskSource::Augmented),
            other => Err(format!("unknown task source `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    pub train: Vec<ExamplePair>,
    pub test: Vec<ExamplePair>,
    pub source: TaskSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
}

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("malformed task document: {0}")]
    MalformedDocument(String),
    #[error("grid out of range in {location}: {violations}")]
    GridOutOfRange { location: String, violations: GridViolations },
    #[error("task has an empty `{0}` section")]
    EmptySection(&'static str),
    #[error("task id `{0}` does not match the expected convention")]
    InvalidId(String),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Deserialize)]
struct RawPair {
    input: Vec<Vec<i64>>,
    output: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
struct RawTask {
    train: Vec<RawPair>,
    test: Vec<RawPair>,
}

#[derive(Serialize)]
struct Interchange<'a> {
    train: &'a [ExamplePair],
    test: &'a [ExamplePair],
}

fn is_hex_id(id: &str) -> bool {
    id.len() == 8 && id.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

fn check_id(id: &str, source: TaskSource) -> Result<(), TaskError> {
    let ok = match source {
        s if s.uses_hex_ids() => is_hex_id(id),
        TaskSource::Augmented => match id.split_once('#') {
            Some((_, index)) => index.len() == 3 && index.bytes().all(|b| b.is_ascii_digit()),
            None => false,
        },
        _ => !id.is_empty(),
    };
    if ok {
        Ok(())
    } else {
        Err(TaskError::InvalidId(id.to_string()))
    }
}

fn convert_pair(raw: RawPair, section: &str, index: usize) -> Result<ExamplePair, TaskError> {
    let grid = |rows: &[Vec<i64>], side: &str| {
        validate_grid(rows).map_err(|violations| TaskError::GridOutOfRange {
            location: format!("{section}[{index}].{side}"),
            violations,
        })
    };
    Ok(ExamplePair { input: grid(&raw.input, "input")?, output: grid(&raw.output, "output")? })
}

fn convert_section(raw: Vec<RawPair>, section: &'static str) -> Result<Vec<ExamplePair>, TaskError> {
    if raw.is_empty() {
        return Err(TaskError::EmptySection(section));
    }
    raw.into_iter().enumerate().map(|(i, p)| convert_pair(p, section, i)).collect()
}

/// Parses one interchange document (`{"train": [...], "test": [...]}`).
pub fn load_task(id: &str, document: &str, source: TaskSource) -> Result<Task, TaskError> {
    check_id(id, source)?;
    let raw: RawTask = serde_json::from_str(document).map_err(|e| TaskError::MalformedDocument(e.to_string()))?;
    Ok(Task {
        id: id.to_string(),
        train: convert_section(raw.train, "train")?,
        test: convert_section(raw.test, "test")?,
        source,
        category: None,
    })
}

/// Loads `<dir>/<id>.json`-style files; the id is the file stem.
pub fn load_task_file(path: &Path, source: TaskSource) -> Result<Task, TaskError> {
    let document = fs::read_to_string(path).map_err(|e| TaskError::Io { path: path.to_path_buf(), source: e })?;
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    load_task(id, &document, source)
}

/// Loads every `*.json` task directly under `dir`, sorted by id.
///
/// A ConceptARC corpus keeps one sub-directory per category; tasks found
/// there get the directory name as their category.
pub fn load_corpus(dir: &Path, source: TaskSource) -> Result<Vec<Task>, TaskError> {
    let mut tasks = Vec::new();
    for path in sorted_entries(dir)? {
        if path.is_dir() && source == TaskSource::ConceptArc {
            let category = path.file_name().and_then(|s| s.to_str()).map(str::to_string);
            for inner in sorted_entries(&path)? {
                if is_json(&inner) {
                    let mut task = load_task_file(&inner, source)?;
                    task.category = category.clone();
                    tasks.push(task);
                }
            }
        } else if is_json(&path) {
            tasks.push(load_task_file(&path, source)?);
        }
    }
    tasks.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(tasks)
}

fn is_json(path: &Path) -> bool {
    path.is_file() && path.extension().is_some_and(|e| e == "json")
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, TaskError> {
    let io = |e| TaskError::Io { path: dir.to_path_buf(), source: e };
    let mut entries = fs::read_dir(dir)
        .map_err(io)?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(io)?;
    entries.sort();
    Ok(entries)
}

/// Id of the `index`-th augmented example of `parent`: `<parent>#NNN`.
pub fn augmented_id(parent: &str, index: usize) -> String {
    format!("{parent}#{index:03}")
}

/// Reads `<root>/<parent-id>/NNN.json`, each holding one `{input, output}`
/// pair, and attaches every pair as the single test example of a task that
/// shares the parent's demonstrations.
pub fn load_augmented(root: &Path, parent: &Task) -> Result<Vec<Task>, TaskError> {
    let dir = root.join(&parent.id);
    let mut tasks = Vec::new();
    for path in sorted_entries(&dir)? {
        if !is_json(&path) {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let index: usize = stem
            .parse()
            .map_err(|_| TaskError::MalformedDocument(format!("augmented file name `{stem}` is not an index")))?;
        let text = fs::read_to_string(&path).map_err(|e| TaskError::Io { path: path.clone(), source: e })?;
        let raw: RawPair = serde_json::from_str(&text).map_err(|e| TaskError::MalformedDocument(e.to_string()))?;
        let pair = convert_pair(raw, "augmented", index)?;
        let id = augmented_id(&parent.id, index);
        check_id(&id, TaskSource::Augmented)?;
        tasks.push(Task {
            id,
            train: parent.train.clone(),
            test: vec![pair],
            source: TaskSource::Augmented,
            category: parent.category.clone(),
        });
    }
    Ok(tasks)
}

impl Task {
    /// Interchange JSON (train/test only; id and source live outside the document).
    pub fn to_interchange(&self) -> String {
        serde_json::to_string(&Interchange { train: &self.train, test: &self.test }).expect("task serializes")
    }

    pub fn primary_test(&self) -> &ExamplePair {
        &self.test[0]
    }

    /// True when no example changes the grid size.
    pub fn preserves_dims(&self) -> bool {
        self.train.iter().chain(&self.test).all(ExamplePair::same_dims)
    }

    /// The parent id of an augmented task (`abc#007` → `abc`).
    pub fn parent_id(&self) -> &str {
        self.id.split_once('#').map_or(&self.id, |(p, _)| p)
    }
}
