//! Inferential coherence: which solved tasks stay solved across
//! rule-preserving variants of their test example.

use std::collections::BTreeMap;
use std::path::Path;

use arcbench_core::record::EvalRecord;
use arcbench_core::task::{load_augmented, TaskError};
use arcbench_core::Task;

use super::{run_cot, HarnessError, Runner};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoherenceOutcome {
    /// CoT on every original task, `repeats` times each.
    pub phase1: Vec<EvalRecord>,
    /// One attempt on every augmented example of each qualifying task.
    pub phase2: Vec<EvalRecord>,
    /// Phase-2 accuracy keyed by parent task id; only qualifying tasks appear.
    pub accuracy: BTreeMap<String, f64>,
}

impl CoherenceOutcome {
    /// Tasks solved at least once in phase 1.
    pub fn qualifying(&self) -> impl Iterator<Item = &str> {
        self.accuracy.keys().map(String::as_str)
    }
}

pub fn run_inferential_coherence(tasks: &[Task], augmented_root: &Path, runner: &Runner<'_>, repeats: u32) -> Result<CoherenceOutcome, HarnessError> {
    let mut out = CoherenceOutcome::default();
    let mut qualifying = Vec::new();
    for task in tasks {
        let mut solved = false;
        for iteration in 0..repeats {
            let r = run_cot(task, runner, iteration)?;
            solved |= r.result_correct;
            out.phase1.push(r);
        }
        if solved {
            qualifying.push(task);
        }
    }

    for task in qualifying {
        let variants = match load_augmented(augmented_root, task) {
            Ok(v) => v,
            Err(TaskError::Io { source, .. }) if source.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        if variants.is_empty() {
            return Err(HarnessError::MissingAugmentation(task.id.clone()));
        }
        let mut correct = 0usize;
        for variant in &variants {
            let r = run_cot(variant, runner, 0)?;
            correct += usize::from(r.result_correct);
            out.phase2.push(r);
        }
        out.accuracy.insert(task.id.clone(), correct as f64 / variants.len() as f64);
    }
    Ok(out)
}
