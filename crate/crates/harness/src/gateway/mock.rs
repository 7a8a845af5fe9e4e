use std::collections::HashMap;
use std::sync::Mutex;

use arcbench_core::dsl::{transform_state, StateTransform};
use arcbench_core::prompt::render_grid_text;
use arcbench_core::TemplateId;

use super::{Backend, GatewayError, Request};
use crate::extract::extract_grids;

/// Offline stand-in for a model. Answers are a pure function of the prompt
/// and of how many times that exact prompt has been seen, so runs are
/// repeatable. It recognises each prompt family by template and replies in
/// that family's expected shape.
#[derive(Default)]
pub struct HeuristicMock {
    seen: Mutex<HashMap<String, usize>>,
}

impl HeuristicMock {
    pub fn new() -> HeuristicMock {
        HeuristicMock::default()
    }
}

const INSTRUCTIONS: [&str; 4] = [
    "Identify every object in the quiz input grid.",
    "Compare each example input with its output to find what changed.",
    "Apply the same change to the objects of the quiz input.",
    "Check that the grid size is unchanged.",
];

fn seed(hash: &str) -> usize {
    usize::from_str_radix(&hash[..4], 16).unwrap_or(0)
}

fn count_prefix(text: &str, prefix: &str) -> usize {
    text.lines().filter(|l| l.starts_with(prefix)).count()
}

impl Backend for HeuristicMock {
    fn complete(&self, request: &Request, hash: &str) -> Result<String, GatewayError> {
        let nth = {
            let mut seen = self.seen.lock().unwrap();
            let n = seen.entry(hash.to_string()).or_default();
            *n += 1;
            *n - 1
        };
        let s = seed(hash) + nth;
        let grids = extract_grids(&request.prompt);
        let last = grids.last().map(render_grid_text).unwrap_or_else(|| "[[0]]".into());

        let text = match request.template {
            TemplateId::Decomposing => {
                if s.is_multiple_of(11) {
                    "I would look at the objects first and then decide.".to_string()
                } else {
                    let n = 1 + s % 3;
                    (0..n).map(|i| format!("Q{}: {}", i + 1, INSTRUCTIONS[(s + i) % INSTRUCTIONS.len()])).collect::<Vec<_>>().join("\n")
                }
            }
            TemplateId::TotDecomposeVote => {
                let k = count_prefix(&request.prompt, "Choice ").max(1);
                format!("Choice {} keeps the steps concrete.\nThe best choice is {}", 1 + s % k, 1 + s % k)
            }
            TemplateId::TotStepVote => {
                let m = count_prefix(&request.prompt, "Answer ").max(1);
                if s.is_multiple_of(5) {
                    "All answers look similar to me.".to_string()
                } else {
                    format!("The best answer is `{}'.", 1 + s % m)
                }
            }
            TemplateId::DslExperiment => {
                let first = if s.is_multiple_of(2) { "horizontal_flip(state)" } else { "vertical_flip(state)" };
                format!(
                    "{{\n\"step\": \"1\",\n\"dsl\": \"{first}\",\n\"description\": \"mirror the grid\"\n}}\n\
                     {{\n\"step\": \"2\",\n\"dsl\": \"complete(state)\",\n\"description\": \"done\"\n}}"
                )
            }
            TemplateId::DslUnderstandingTask => {
                let input = grids.first().map(render_grid_text).unwrap_or_else(|| "[[0]]".into());
                format!("The resulting grid is:\n{input}")
            }
            TemplateId::Itp => {
                let example_input = grids.first().map(render_grid_text).unwrap_or_else(|| "[[0]]".into());
                format!("Answer 1:\n{last}\n\nAnswer 2:\n{example_input}")
            }
            TemplateId::Cot | TemplateId::StepByStep => match (s % 4, grids.last()) {
                (0, Some(g)) => format!("Flipping the grid gives\n{}", render_grid_text(&transform_state(g, StateTransform::HorizontalFlip))),
                (1, _) => "I cannot determine the pattern.".to_string(),
                _ => format!("The output grid is\n{last}"),
            },
            _ => last,
        };
        Ok(text)
    }

    fn name(&self) -> &'static str {
        "mock"
    }
}
