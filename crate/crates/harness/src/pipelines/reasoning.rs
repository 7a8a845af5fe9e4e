//! Chain-of-thought, least-to-most and tree-of-thoughts solving.

use std::sync::OnceLock;

use arcbench_core::prompt::{cot_prompt, decomposing_prompt, step_by_step_prompt, tot_decompose_vote_prompt, tot_step_vote_prompt, StepContext};
use arcbench_core::record::{Condition, EvalRecord, Pipeline};
use arcbench_core::{Grid, Task};
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{cached_regex, HarnessError, Runner};
use crate::extract::extract_grid;

pub const DECOMPOSITION_UNPARSEABLE: &str = "DecompositionUnparseable";

pub fn run_cot(task: &Task, runner: &Runner<'_>, iteration: u32) -> Result<EvalRecord, HarnessError> {
    let exchange = runner.ask(&task.id, &cot_prompt(task))?;
    let predicted = extract_grid(&exchange.response);
    let failure = predicted.is_none().then_some("NoGridInResponse");
    let record = EvalRecord::scored(&task.id, iteration, Pipeline::Cot, Condition::default(), predicted, &task.primary_test().output);
    Ok(match failure {
        Some(f) => record.with_failure(f),
        None => record,
    })
}

/// `Q1: ...` lines in order of appearance; `None` when there are none.
pub fn parse_decomposition(text: &str) -> Option<Vec<String>> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = cached_regex(&RE, r"(?m)^[\s*#>-]*Q(\d+)\s*\**\s*[:.)]\s*(.*?)\s*$");
    let lines: Vec<String> = re.captures_iter(text).map(|c| c[2].trim_matches('*').trim().to_string()).filter(|q| !q.is_empty()).collect();
    (!lines.is_empty()).then_some(lines)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoteKind {
    /// "The best choice is s"
    Choice,
    /// "The best answer is `s'"
    Answer,
}

/// 1-based winner from the last conclusion phrase, if it names one of
/// `candidates`. The number may be bare or wrapped in quotes or backticks.
pub fn parse_vote(text: &str, kind: VoteKind, candidates: usize) -> Option<usize> {
    static CHOICE: OnceLock<Regex> = OnceLock::new();
    static ANSWER: OnceLock<Regex> = OnceLock::new();
    let re = match kind {
        VoteKind::Choice => cached_regex(&CHOICE, r#"(?i)best\s+choice\s+is\s*[`'"‘“]?\s*(\d+)"#),
        VoteKind::Answer => cached_regex(&ANSWER, r#"(?i)best\s+answer\s+is\s*[`'"‘“]?\s*(\d+)"#),
    };
    let s: usize = re.captures_iter(text).last()?[1].parse().ok()?;
    (1..=candidates).contains(&s).then_some(s)
}

/// Solves the instructions one at a time, carrying the grid the model
/// reported after each step into the next prompt.
fn solve_sequentially(
    instructions: &[String],
    mut solve_one: impl FnMut(&StepContext<'_>) -> Result<Option<Grid>, HarnessError>,
) -> Result<Option<Grid>, HarnessError> {
    let mut grid: Option<Grid> = None;
    for (i, current) in instructions.iter().enumerate() {
        let ctx = StepContext { previous: &instructions[..i], previous_grid: grid.as_ref(), current, current_index: i + 1 };
        if let Some(g) = solve_one(&ctx)? {
            grid = Some(g);
        }
    }
    Ok(grid)
}

fn finish(task: &Task, pipeline: Pipeline, iteration: u32, predicted: Option<Grid>, steps: usize) -> EvalRecord {
    let missing = predicted.is_none();
    let r = EvalRecord::scored(&task.id, iteration, pipeline, Condition::default(), predicted, &task.primary_test().output).with_steps(steps);
    if missing {
        r.with_failure("NoGridInResponse")
    } else {
        r
    }
}

pub fn run_ltm(task: &Task, runner: &Runner<'_>, iteration: u32) -> Result<EvalRecord, HarnessError> {
    let decomposition = runner.ask(&task.id, &decomposing_prompt(task))?;
    let Some(instructions) = parse_decomposition(&decomposition.response) else {
        return Ok(EvalRecord::scored(&task.id, iteration, Pipeline::Ltm, Condition::default(), None, &task.primary_test().output)
            .with_failure(DECOMPOSITION_UNPARSEABLE));
    };
    let predicted = solve_sequentially(&instructions, |ctx| {
        let ex = runner.ask(&task.id, &step_by_step_prompt(task, ctx))?;
        Ok(extract_grid(&ex.response))
    })?;
    Ok(finish(task, Pipeline::Ltm, iteration, predicted, instructions.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TotParams {
    /// Decomposition candidates.
    pub k: usize,
    /// Grid candidates per instruction.
    pub m: usize,
}

impl Default for TotParams {
    fn default() -> Self {
        TotParams { k: 3, m: 3 }
    }
}

/// Gateway calls: `k` decompositions, one vote, then `m` answers and one
/// vote per instruction of the winning decomposition.
pub fn run_tot(task: &Task, runner: &Runner<'_>, params: TotParams, iteration: u32) -> Result<EvalRecord, HarnessError> {
    if params.k < 2 || params.m < 2 {
        return Err(HarnessError::InvalidInput { task_id: task.id.clone(), reason: format!("k and m must be at least 2, got {params:?}") });
    }
    let prompt = decomposing_prompt(task);
    let mut candidates = Vec::new();
    for _ in 0..params.k {
        let ex = runner.ask(&task.id, &prompt)?;
        if let Some(c) = parse_decomposition(&ex.response) {
            candidates.push(c);
        }
    }
    if candidates.is_empty() {
        return Ok(EvalRecord::scored(&task.id, iteration, Pipeline::Tot, Condition::default(), None, &task.primary_test().output)
            .with_failure(DECOMPOSITION_UNPARSEABLE));
    }
    let vote = runner.ask(&task.id, &tot_decompose_vote_prompt(task, &candidates))?;
    let chosen = parse_vote(&vote.response, VoteKind::Choice, candidates.len()).unwrap_or(1);
    let instructions = candidates.swap_remove(chosen - 1);

    let predicted = solve_sequentially(&instructions, |ctx| {
        let step_prompt = step_by_step_prompt(task, ctx);
        let mut texts = Vec::with_capacity(params.m);
        let mut grids = Vec::with_capacity(params.m);
        for _ in 0..params.m {
            let ex = runner.ask(&task.id, &step_prompt)?;
            let g = extract_grid(&ex.response);
            texts.push(g.as_ref().map_or_else(|| ex.response.clone(), arcbench_core::render_grid_text));
            grids.push(g);
        }
        let vote = runner.ask(&task.id, &tot_step_vote_prompt(task, ctx, &texts))?;
        let best = parse_vote(&vote.response, VoteKind::Answer, params.m).unwrap_or(1);
        Ok(grids.swap_remove(best - 1))
    })?;
    Ok(finish(task, Pipeline::Tot, iteration, predicted, instructions.len()))
}
