//! Per-pipeline prompt assembly on top of [`render`].

use crate::grid::Grid;
use crate::objects::ObjectSet;
use crate::task::{ExamplePair, Task};

use super::{render, render_grid_text, Category, PromptError, RenderedPrompt, TemplateId};

/// Numbered demonstration blocks in the layout of the stored examples.
pub fn demo_examples_text(pairs: &[ExamplePair]) -> String {
    pairs
        .iter()
        .enumerate()
        .map(|(i, pair)| {
            format!(
                "Example {}\n\nIf input grids are like that:\n{}\n\nthen these grids change to output grids below:\n{}.",
                i + 1,
                render_grid_text(&pair.input),
                render_grid_text(&pair.output)
            )
        })
        .collect::<Vec<_>>()
        .join("\n\n")
}

/// The test input posed as a quiz.
pub fn quiz_text(input: &Grid) -> String {
    format!("Quiz\n\nIf input grids are like that:\n{}\n\nthen output grids?", render_grid_text(input))
}

/// `Q1: ...` lines, numbered from 1.
pub fn instruction_lines(instructions: &[String]) -> String {
    instructions
        .iter()
        .enumerate()
        .map(|(i, q)| format!("Q{}: {}", i + 1, q))
        .collect::<Vec<_>>()
        .join("\n")
}

fn one_shot_example() -> String {
    render(TemplateId::CotOneShotExample, &[("one_shot_data", TemplateId::CotOneShotData.body().trim_end())])
        .expect("one-shot template has one slot")
        .text
        .trim_end()
        .to_string()
}

pub fn cot_prompt(task: &Task) -> RenderedPrompt {
    let one_shot = one_shot_example();
    let demos = demo_examples_text(&task.train);
    let test = render_grid_text(&task.primary_test().input);
    render(TemplateId::Cot, &[("one_shot_example", &one_shot), ("demo_examples", &demos), ("test_input", &test)])
        .expect("cot slots are complete")
}

pub fn decomposing_prompt(task: &Task) -> RenderedPrompt {
    let demos = demo_examples_text(&task.train);
    let quiz = quiz_text(&task.primary_test().input);
    render(
        TemplateId::Decomposing,
        &[
            ("decomposing_demo_examples", TemplateId::DecomposingDemoExamples.body().trim_end()),
            ("decomposing_test_input", TemplateId::DecomposingTestInput.body().trim_end()),
            ("demo_examples", &demos),
            ("test_input", &quiz),
        ],
    )
    .expect("decomposing slots are complete")
}

/// State carried between sequential solving calls.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    /// Instructions already carried out, in order.
    pub previous: &'a [String],
    /// Grid produced by the last carried-out instruction.
    pub previous_grid: Option<&'a Grid>,
    /// The instruction to carry out now, and its 1-based number.
    pub current: &'a str,
    pub current_index: usize,
}

impl StepContext<'_> {
    fn previous_text(&self) -> String {
        if self.previous.is_empty() {
            "Previous instructions: None".to_string()
        } else {
            format!("Previous instructions:\n{}", instruction_lines(self.previous))
        }
    }

    fn previous_grid_text(&self) -> String {
        match self.previous_grid {
            Some(g) => format!("Previous changed grid:\n{}", render_grid_text(g)),
            None => "Previous changed grid: None".to_string(),
        }
    }

    fn current_text(&self) -> String {
        format!("Current instruction:\nQ{}: {}", self.current_index, self.current)
    }
}

pub fn step_by_step_prompt(task: &Task, ctx: &StepContext<'_>) -> RenderedPrompt {
    let one_shot = one_shot_example();
    let demos = demo_examples_text(&task.train);
    let test = render_grid_text(&task.primary_test().input);
    let (prev, prev_grid, current) = (ctx.previous_text(), ctx.previous_grid_text(), ctx.current_text());
    render(
        TemplateId::StepByStep,
        &[
            ("one_shot_example", &one_shot),
            ("demo_examples", &demos),
            ("test_input", &test),
            ("previous_instructions", &prev),
            ("previous_changed_grid", &prev_grid),
            ("current_instruction", &current),
        ],
    )
    .expect("step slots are complete")
}

/// Vote over candidate decompositions, each a list of instructions.
pub fn tot_decompose_vote_prompt(task: &Task, candidates: &[Vec<String>]) -> RenderedPrompt {
    let demos = demo_examples_text(&task.train);
    let quiz = quiz_text(&task.primary_test().input);
    let choices = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| format!("Choice {}:\n{}", i + 1, instruction_lines(c)))
        .collect::<Vec<_>>()
        .join("\n\n");
    render(TemplateId::TotDecomposeVote, &[("demo_examples", &demos), ("test_input", &quiz), ("choices", &choices)])
        .expect("vote slots are complete")
}

/// Vote over candidate grids for one instruction. Candidates without a
/// readable grid are shown as their raw text.
pub fn tot_step_vote_prompt(task: &Task, ctx: &StepContext<'_>, answers: &[String]) -> RenderedPrompt {
    let demos = demo_examples_text(&task.train);
    let quiz = quiz_text(&task.primary_test().input);
    let (prev, prev_grid, current) = (ctx.previous_text(), ctx.previous_grid_text(), ctx.current_text());
    let answers = answers
        .iter()
        .enumerate()
        .map(|(i, a)| format!("Answer {}:\n{}", i + 1, a.trim()))
        .collect::<Vec<_>>()
        .join("\n\n");
    render(
        TemplateId::TotStepVote,
        &[
            ("demo_examples", &demos),
            ("test_input", &quiz),
            ("previous_instructions", &prev),
            ("previous_changed_grid", &prev_grid),
            ("current_instruction", &current),
            ("current_changed_grid", &answers),
        ],
    )
    .expect("vote slots are complete")
}

/// Optional extra information for the DSL experiment.
#[derive(Debug, Clone, Copy, Default)]
pub struct DslInserts<'a> {
    pub test_output: Option<&'a Grid>,
    pub description: Option<&'a str>,
}

/// Introduction, DSL reference (code with comments) and task prompt.
pub fn dsl_experiment_prompt(task: &Task, objects: &ObjectSet, inserts: DslInserts<'_>) -> RenderedPrompt {
    let dsl_prompt = render(
        TemplateId::DslPrompt,
        &[
            ("dsl_functions", TemplateId::DslFunctions.body().trim_end()),
            ("dsl_usage_example", TemplateId::DslUsageExample.body().trim_end()),
        ],
    )
    .expect("dsl prompt slots are complete");

    let demos = demo_examples_text(&task.train);
    let quiz = quiz_text(&task.primary_test().input);
    let mut extra = String::new();
    if let Some(g) = inserts.test_output {
        extra.push_str(&format!("\n\nThe output grid of the quiz is:\n{}", render_grid_text(g)));
    }
    if let Some(d) = inserts.description {
        extra.push_str(&format!("\n\nA person described the solution as follows:\n{}", d.trim()));
    }
    let task_prompt = render(
        TemplateId::DslTask,
        &[("demo_examples", &demos), ("test_input", &quiz), ("objects", &objects.prompt_text()), ("condition_inserts", &extra)],
    )
    .expect("dsl task slots are complete");

    render(
        TemplateId::DslExperiment,
        &[
            ("introduction", TemplateId::DslIntroduction.body().trim_end()),
            ("dsl_prompt", dsl_prompt.text.trim_end()),
            ("task_prompt", task_prompt.text.trim_end()),
        ],
    )
    .expect("experiment slots are complete")
}

/// Input grid plus a call sequence whose result the model must produce.
pub fn dsl_understanding_prompt(input: &Grid, objects: &ObjectSet, calls: &[String]) -> RenderedPrompt {
    let path = calls
        .iter()
        .enumerate()
        .map(|(i, c)| format!("Step {}: {}", i + 1, c))
        .collect::<Vec<_>>()
        .join("\n");
    let input_text = format!("Input grid:\n{}", render_grid_text(input));
    render(TemplateId::DslUnderstandingTask, &[("test_input", &input_text), ("objects", &objects.prompt_text()), ("dsl_path", &path)])
        .expect("understanding slots are complete")
}

/// Inverse-transformation prompt asking for `answers` candidate inputs that
/// map to `target_output`. Any pair whose output is the target is dropped
/// from the shown examples.
pub fn build_itp(category: &str, examples: &[ExamplePair], target_output: &Grid, answers: usize) -> Result<RenderedPrompt, PromptError> {
    let category: Category = category.parse()?;
    let shown: Vec<ExamplePair> = examples.iter().filter(|p| &p.output != target_output).cloned().collect();
    let pairs = demo_examples_text(&shown);
    let target = format!("Target output:\n{}\n\nthen input grids?", render_grid_text(target_output));
    let answers = answers.to_string();
    render(
        TemplateId::Itp,
        &[
            ("category_prompt", category.prompt().trim_end()),
            ("example_pairs", &pairs),
            ("target_output", &target),
            ("answers", &answers),
        ],
    )
}
