//! Inverse transformation prompting: asking for new inputs that map to a
//! known output under the task's rule.

use std::collections::BTreeMap;
use std::fmt;

use arcbench_core::prompt::build_itp;
use arcbench_core::stats::ValidityLedgerEntry;
use arcbench_core::task::ExamplePair;
use arcbench_core::{Grid, Task};
use serde::{Deserialize, Serialize};

use super::{HarnessError, Runner};
use crate::extract::extract_grids;
use crate::gateway::whitespace_tokens;

pub const COPIES_TARGET_INPUT: &str = "auto:copies-target-input";
pub const COPIES_EXAMPLE_INPUT: &str = "auto:copies-example-input";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pending,
    Valid,
    Invalid,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pending => "pending",
            Verdict::Valid => "valid",
            Verdict::Invalid => "invalid",
        })
    }
}

/// One generated candidate input awaiting (or carrying) a review verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationRecord {
    /// `<task>-t<target>-a<answer>`, unique within a run.
    pub id: String,
    pub task_id: String,
    pub category: String,
    /// Index of the target pair among train followed by test pairs.
    pub target_index: usize,
    pub target_output: Grid,
    pub candidate_input: Grid,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reviewer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Request hash of the exchange that produced the candidate.
    pub exchange: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ItpOutcome {
    pub records: Vec<GenerationRecord>,
    pub warnings: Vec<String>,
}

/// Uses every example pair in turn as the generation target, requesting
/// `answers` candidates per call. Copies of the target's true input or of
/// a shown example input are marked invalid on the spot; everything else
/// waits for review.
pub fn run_itp(task: &Task, runner: &Runner<'_>, answers: usize) -> Result<ItpOutcome, HarnessError> {
    let category = task.category.clone().ok_or_else(|| HarnessError::InvalidInput { task_id: task.id.clone(), reason: "no category".into() })?;
    let pairs: Vec<&ExamplePair> = task.train.iter().chain(&task.test).collect();
    if pairs.len() < 2 {
        return Err(HarnessError::InvalidInput { task_id: task.id.clone(), reason: "ITP needs at least two example pairs".into() });
    }

    let mut out = ItpOutcome::default();
    for (j, target) in pairs.iter().enumerate() {
        let examples: Vec<ExamplePair> = pairs.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, p)| (*p).clone()).collect();
        let shown_inputs: Vec<&Grid> = examples.iter().filter(|p| p.output != target.output).map(|p| &p.input).collect();
        let prompt = build_itp(&category, &examples, &target.output, answers)?;
        let exchange = runner.ask(&task.id, &prompt)?;

        let grids = extract_grids(&exchange.response);
        let candidates = &grids[grids.len().saturating_sub(answers)..];
        if candidates.len() < answers {
            out.warnings.push(format!("{} target {j}: {} of {answers} answers extracted", task.id, candidates.len()));
        }
        let prompt_tokens = whitespace_tokens(&exchange.request.prompt);
        let completion_tokens = whitespace_tokens(&exchange.response);
        for (k, candidate) in candidates.iter().enumerate() {
            let auto = if *candidate == target.input {
                Some(COPIES_TARGET_INPUT)
            } else if shown_inputs.contains(&candidate) {
                Some(COPIES_EXAMPLE_INPUT)
            } else {
                None
            };
            out.records.push(GenerationRecord {
                id: format!("{}-t{j}-a{}", task.id, k + 1),
                task_id: task.id.clone(),
                category: category.clone(),
                target_index: j,
                target_output: target.output.clone(),
                candidate_input: candidate.clone(),
                verdict: if auto.is_some() { Verdict::Invalid } else { Verdict::Pending },
                reviewer: auto.map(str::to_string),
                note: None,
                exchange: exchange.request_hash.clone(),
                prompt_tokens,
                completion_tokens,
            });
        }
    }
    if out.records.is_empty() {
        return Err(HarnessError::NoCandidatesExtracted(task.id.clone()));
    }
    Ok(out)
}

/// Per-category counts. Every candidate counts as generated; only those
/// judged valid count as valid.
pub fn validity_ledger(records: &[GenerationRecord]) -> Vec<ValidityLedgerEntry> {
    let mut by_cat: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for r in records {
        let e = by_cat.entry(&r.category).or_default();
        e.0 += 1;
        e.1 += u64::from(r.verdict == Verdict::Valid);
    }
    by_cat.into_iter().map(|(c, (g, v))| ValidityLedgerEntry::new(c, g, v)).collect()
}
