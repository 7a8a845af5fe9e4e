//! Declarative experiment plans, read from TOML.
//!
//! ```toml
//! name = "cot-smoke"
//! seed = 7
//! tasks_dir = "tasks"          # relative to the plan file
//! source = "arc-train"
//! task_ids = ["0a1b2c3d"]      # empty or absent: every task in tasks_dir
//! repeats = 5
//! pipelines = ["cot", "ltm", "tot"]
//!
//! [generation]
//! model = "gpt-4o"
//! temperature = 0.0
//!
//! [tot]
//! k = 3
//! m = 3
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use arcbench_core::record::Condition;
use arcbench_core::task::{load_corpus, TaskSource};
use arcbench_core::Task;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::GenParams;
use crate::pipelines::TotParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanPipeline {
    Cot,
    Ltm,
    Tot,
    DslComposition,
    DslUnderstanding,
    InferentialCoherence,
    Itp,
}

impl fmt::Display for PlanPipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlanPipeline::Cot => "cot",
            PlanPipeline::Ltm => "ltm",
            PlanPipeline::Tot => "tot",
            PlanPipeline::DslComposition => "dsl_composition",
            PlanPipeline::DslUnderstanding => "dsl_understanding",
            PlanPipeline::InferentialCoherence => "inferential_coherence",
            PlanPipeline::Itp => "itp",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generation {
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
}

fn default_model() -> String {
    GenParams::default().model
}

fn default_max_tokens() -> u32 {
    GenParams::default().max_tokens
}

impl Default for Generation {
    fn default() -> Self {
        let p = GenParams::default();
        Generation { model: p.model, temperature: p.temperature, max_tokens: p.max_tokens }
    }
}

impl From<&Generation> for GenParams {
    fn from(g: &Generation) -> GenParams {
        GenParams { model: g.model.clone(), temperature: g.temperature, max_tokens: g.max_tokens }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub tasks_dir: PathBuf,
    #[serde(default = "default_source")]
    pub source: TaskSource,
    #[serde(default)]
    pub task_ids: Vec<String>,
    #[serde(default = "default_repeats")]
    pub repeats: u32,
    pub pipelines: Vec<PlanPipeline>,
    #[serde(default)]
    pub generation: Generation,
    #[serde(default)]
    pub tot: TotParams,
    /// DSL composition conditions; defaults to the plain one.
    #[serde(default = "default_conditions")]
    pub conditions: Vec<Condition>,
    /// `<parent-id>/NNN.json` variants for inferential coherence.
    #[serde(default)]
    pub augmented_dir: Option<PathBuf>,
    /// TOML table of task id to human description.
    #[serde(default)]
    pub descriptions: Option<PathBuf>,
    /// Directory of `<task-id>.jsonl` reference trajectories.
    #[serde(default)]
    pub solutions: Option<PathBuf>,
    #[serde(default = "default_answers")]
    pub itp_answers: usize,
    /// Upper bound on concurrently processed tasks.
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_source() -> TaskSource {
    TaskSource::ArcTrain
}
fn default_repeats() -> u32 {
    1
}
fn default_conditions() -> Vec<Condition> {
    vec![Condition::default()]
}
fn default_answers() -> usize {
    2
}
fn default_workers() -> usize {
    4
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("plan syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("writing plan: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("invalid plan: {0}")]
    Invalid(String),
    #[error(transparent)]
    Task(#[from] arcbench_core::task::TaskError),
}

impl ExperimentPlan {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<ExperimentPlan, PlanError> {
        let mut plan: ExperimentPlan = toml::from_str(text)?;
        plan.base_dir = base_dir.to_path_buf();
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<ExperimentPlan, PlanError> {
        let text = fs::read_to_string(path).map_err(|source| PlanError::Io { path: path.to_path_buf(), source })?;
        ExperimentPlan::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: String| Err(PlanError::Invalid(m));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return bad(format!("name `{}` must be non-empty and use only letters, digits, '-', '_' or '.'", self.name));
        }
        if self.repeats < 1 {
            return bad("repeats must be at least 1".into());
        }
        if self.pipelines.is_empty() {
            return bad("no pipelines listed".into());
        }
        let mut seen = self.pipelines.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.pipelines.len() {
            return bad("a pipeline is listed twice".into());
        }
        let has = |p| self.pipelines.contains(&p);
        if has(PlanPipeline::Cot) && has(PlanPipeline::InferentialCoherence) {
            return bad("cot and inferential_coherence both write cot records; run them as separate plans".into());
        }
        if has(PlanPipeline::Tot) && (self.tot.k < 2 || self.tot.m < 2) {
            return bad(format!("tot needs k >= 2 and m >= 2, got k = {}, m = {}", self.tot.k, self.tot.m));
        }
        if has(PlanPipeline::InferentialCoherence) && self.augmented_dir.is_none() {
            return bad("inferential_coherence needs augmented_dir".into());
        }
        if has(PlanPipeline::DslUnderstanding) && self.solutions.is_none() {
            return bad("dsl_understanding needs solutions".into());
        }
        if has(PlanPipeline::DslComposition) {
            if self.conditions.is_empty() {
                return bad("dsl_composition needs at least one condition".into());
            }
            if self.conditions.iter().any(|c| c.with_human_description) && self.descriptions.is_none() {
                return bad("a condition with human descriptions needs a descriptions file".into());
            }
        }
        if has(PlanPipeline::Itp) && self.itp_answers == 0 {
            return bad("itp_answers must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// The plan as TOML with every path made absolute, so it reloads the
    /// same from any directory.
    pub fn to_resolved_toml(&self) -> Result<String, PlanError> {
        let abs = |p: &Path| {
            let p = self.resolve(p);
            std::path::absolute(&p).map_err(|source| PlanError::Io { path: p, source })
        };
        let opt = |p: &Option<PathBuf>| p.as_deref().map(abs).transpose();
        let plan = ExperimentPlan {
            tasks_dir: abs(&self.tasks_dir)?,
            augmented_dir: opt(&self.augmented_dir)?,
            descriptions: opt(&self.descriptions)?,
            solutions: opt(&self.solutions)?,
            ..self.clone()
        };
        Ok(toml::to_string(&plan)?)
    }

    pub fn gen_params(&self) -> GenParams {
        (&self.generation).into()
    }

    /// The selected tasks, in id order. Every listed id must exist.
    pub fn load_tasks(&self) -> Result<Vec<Task>, PlanError> {
        let all = load_corpus(&self.resolve(&self.tasks_dir), self.source)?;
        if self.task_ids.is_empty() {
            return Ok(all);
        }
        let mut by_id: BTreeMap<String, Task> = all.into_iter().map(|t| (t.id.clone(), t)).collect();
        let mut picked = Vec::with_capacity(self.task_ids.len());
        for id in &self.task_ids {
            match by_id.remove(id) {
                Some(t) => picked.push(t),
                None => return Err(PlanError::Invalid(format!("task {id} not found in {}", self.tasks_dir.display()))),
            }
        }
        picked.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(picked)
    }

    pub fn load_descriptions(&self) -> Result<BTreeMap<String, String>, PlanError> {
        let Some(p) = &self.descriptions else { return Ok(BTreeMap::new()) };
        let path = self.resolve(p);
        let text = fs::read_to_string(&path).map_err(|source| PlanError::Io { path, source })?;
        Ok(toml::from_str(&text)?)
    }
}
