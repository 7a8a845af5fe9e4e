//! DSL composition (the model picks a call sequence) and DSL understanding
//! (the model predicts what a given sequence does).

use std::collections::BTreeMap;
use std::sync::OnceLock;

use arcbench_core::dsl::{Session, Trajectory, MAX_STEPS};
use arcbench_core::prompt::{dsl_experiment_prompt, dsl_understanding_prompt, DslInserts};
use arcbench_core::record::{Condition, EvalRecord, Pipeline};
use arcbench_core::stats::StatsError;
use arcbench_core::{Grid, LengthBucket, Task};
use regex::Regex;
use serde_json::Value;

use super::{cached_regex, HarnessError, Runner};
use crate::extract::extract_grid;

pub const NO_PARSABLE_STEPS: &str = "NoParsableSteps";

/// Top-level `{...}` spans, skipping braces inside double-quoted strings.
fn object_spans(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut spans = Vec::new();
    let (mut depth, mut start, mut in_str, mut escaped) = (0usize, 0usize, false, false);
    for (i, &b) in bytes.iter().enumerate() {
        if in_str {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' if depth > 0 => in_str = true,
            b'{' => {
                if depth == 0 {
                    start = i;
                }
                depth += 1;
            }
            b'}' if depth > 0 => {
                depth -= 1;
                if depth == 0 {
                    spans.push(&text[start..=i]);
                }
            }
            _ => {}
        }
    }
    spans
}

/// The `dsl` field of every step record in a response, in order. Accepts a
/// single object, several objects, or an array of them, and falls back to
/// a lenient match for records that are not strict JSON.
pub fn parse_steps(text: &str) -> Vec<String> {
    static LOOSE: OnceLock<Regex> = OnceLock::new();
    let loose = cached_regex(&LOOSE, r#"["'`]?dsl["'`]?\s*:\s*(?:"((?:[^"\\]|\\.)*)"|'([^']*)')"#);
    object_spans(text)
        .into_iter()
        .filter_map(|span| match serde_json::from_str::<Value>(span) {
            Ok(v) => v.get("dsl").and_then(Value::as_str).map(str::to_string),
            Err(_) => loose.captures(span).and_then(|c| c.get(1).or_else(|| c.get(2))).map(|m| m.as_str().to_string()),
        })
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Runs the DSL experiment on one size-preserving task. Parsed calls drive a
/// session on the test input until it completes or runs out of steps.
pub fn run_dsl_composition(
    task: &Task,
    runner: &Runner<'_>,
    condition: Condition,
    description: Option<&str>,
    iteration: u32,
) -> Result<(EvalRecord, Trajectory), HarnessError> {
    if !task.preserves_dims() {
        return Err(HarnessError::SizeChangingTask(task.id.clone()));
    }
    if condition.with_human_description && description.is_none() {
        return Err(HarnessError::MissingDescription(task.id.clone()));
    }
    let target = &task.primary_test().output;
    let mut session = Session::new(task.primary_test().input.clone());
    let inserts = DslInserts {
        test_output: condition.with_test_output.then_some(target),
        description: if condition.with_human_description { description } else { None },
    };
    let exchange = runner.ask(&task.id, &dsl_experiment_prompt(task, session.objects(), inserts))?;

    let steps = parse_steps(&exchange.response);
    if steps.is_empty() {
        let record = EvalRecord::scored(&task.id, iteration, Pipeline::Dsl, condition, None, target).with_failure(NO_PARSABLE_STEPS);
        return Ok((record, Trajectory::default()));
    }
    for call in &steps {
        if session.step(call).is_err() {
            break;
        }
    }
    let trajectory = session.trajectory().clone();
    let record = EvalRecord::scored(&task.id, iteration, Pipeline::Dsl, condition, Some(session.current().clone()), target).with_steps(trajectory.len());
    Ok((record, trajectory))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnderstandingOutcome {
    pub n: usize,
    pub correct: bool,
    /// Engine result of the call sequence.
    pub expected: Grid,
    pub record: EvalRecord,
}

/// Asks the model for the grid a reference call sequence produces and
/// compares it with the engine's own result.
pub fn run_dsl_understanding(
    task_id: &str,
    initial: &Grid,
    calls: &[String],
    runner: &Runner<'_>,
    iteration: u32,
) -> Result<UnderstandingOutcome, HarnessError> {
    if calls.is_empty() || calls.len() > MAX_STEPS {
        return Err(HarnessError::InvalidInput { task_id: task_id.to_string(), reason: format!("reference solution has {} steps, expected 1..={MAX_STEPS}", calls.len()) });
    }
    let session = Session::replay(initial.clone(), calls.iter().map(String::as_str))
        .map_err(|e| HarnessError::InvalidInput { task_id: task_id.to_string(), reason: e.to_string() })?;
    let expected = session.current().clone();
    let exchange = runner.ask(task_id, &dsl_understanding_prompt(initial, session.objects(), calls))?;
    let predicted = extract_grid(&exchange.response);
    let missing = predicted.is_none();
    let mut record = EvalRecord::scored(task_id, iteration, Pipeline::Understanding, Condition::default(), predicted, &expected).with_steps(calls.len());
    if missing {
        record = record.with_failure("NoGridInResponse");
    }
    Ok(UnderstandingOutcome { n: calls.len(), correct: record.result_correct, expected, record })
}

/// Groups `(length, correct)` results into buckets with `w_n` = attempts at
/// length n and `a_n` = their success rate, ordered by n.
pub fn buckets_from_outcomes(outcomes: &[(usize, bool)]) -> Result<Vec<LengthBucket>, StatsError> {
    let mut tally: BTreeMap<usize, (u32, u32)> = BTreeMap::new();
    for &(n, ok) in outcomes {
        let t = tally.entry(n).or_default();
        t.0 += 1;
        t.1 += u32::from(ok);
    }
    tally
        .into_iter()
        .map(|(n, (count, correct))| {
            let n = u32::try_from(n).map_err(|_| StatsError::InvalidBucket { n: u32::MAX, reason: "length out of range" })?;
            LengthBucket::new(n, f64::from(count), f64::from(correct) / f64::from(count))
        })
        .collect()
}
