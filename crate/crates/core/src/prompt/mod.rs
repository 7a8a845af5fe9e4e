//! Prompt templates and rendering.
//!
//! Template texts are data files under `assets/templates`, embedded at
//! build time and listed with their slot names and SHA-256 digests in
//! `manifest.json`. Slots are written `{{name}}`.

mod builders;
mod category;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::grid::Grid;

pub use builders::*;
pub use category::Category;

macro_rules! templates {
    ($($variant:ident => $id:literal, $file:literal;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum TemplateId {
            $(#[serde(rename = $id)] $variant,)*
        }

        impl TemplateId {
            pub const ALL: &'static [TemplateId] = &[$(TemplateId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(TemplateId::$variant => $id,)*
                }
            }

            /// Path relative to the template directory.
            pub fn file(self) -> &'static str {
                match self {
                    $(TemplateId::$variant => $file,)*
                }
            }

            pub fn body(self) -> &'static str {
                match self {
                    $(TemplateId::$variant => include_str!(concat!("../../assets/templates/", $file)),)*
                }
            }
        }
    };
}

templates! {
    CotOneShotData => "cot_one_shot_data", "cot_one_shot_data.txt";
    CotOneShotExample => "cot_one_shot_example", "cot_one_shot_example.txt";
    Cot => "cot", "cot.txt";
    DecomposingDemoExamples => "decomposing_demo_examples", "decomposing_demo_examples.txt";
    DecomposingTestInput => "decomposing_test_input", "decomposing_test_input.txt";
    Decomposing => "decomposing", "decomposing.txt";
    StepByStep => "step_by_step", "step_by_step.txt";
    TotDecomposeVote => "tot_decompose_vote", "tot_decompose_vote.txt";
    TotStepVote => "tot_step_vote", "tot_step_vote.txt";
    DslIntroduction => "dsl_introduction", "dsl_introduction.txt";
    DslUsageExample => "dsl_usage_example", "dsl_usage_example.txt";
    DslFunctions => "dsl_functions", "dsl_functions.txt";
    DslPrompt => "dsl_prompt", "dsl_prompt.txt";
    DslTask => "dsl_task", "dsl_task.txt";
    DslExperiment => "dsl_experiment", "dsl_experiment.txt";
    DslUnderstandingTask => "dsl_understanding_task", "dsl_understanding_task.txt";
    Itp => "itp", "itp.txt";
}

pub const MANIFEST: &str = include_str!("../../assets/templates/manifest.json");

impl TemplateId {
    /// Slot names in order of first appearance.
    pub fn slots(self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for piece in Pieces::new(self.body()) {
            if let Piece::Slot(name) = piece {
                if !out.contains(&name) {
                    out.push(name);
                }
            }
        }
        out
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateId {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateId::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| PromptError::UnknownTemplate(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("template `{template}` needs slot `{slot}`")]
    MissingSlot { template: TemplateId, slot: String },
    #[error("template `{template}` has no slot `{slot}`")]
    UnexpectedSlot { template: TemplateId, slot: String },
    #[error("unknown ConceptARC category `{0}`")]
    UnknownCategory(String),
}

/// A fully rendered prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub template: TemplateId,
    pub text: String,
    /// Slot name → SHA-256 of the content substituted for it.
    pub slots: BTreeMap<String, String>,
}

enum Piece<'a> {
    Text(&'a str),
    Slot(&'a str),
}

struct Pieces<'a> {
    rest: &'a str,
}

impl<'a> Pieces<'a> {
    fn new(body: &'a str) -> Self {
        Pieces { rest: body }
    }
}

impl<'a> Iterator for Pieces<'a> {
    type Item = Piece<'a>;

    fn next(&mut self) -> Option<Piece<'a>> {
        if self.rest.is_empty() {
            return None;
        }
        if let Some(start) = self.rest.find("{{") {
            if start > 0 {
                let (text, rest) = self.rest.split_at(start);
                self.rest = rest;
                return Some(Piece::Text(text));
            }
            if let Some(len) = self.rest[2..].find("}}") {
                let name = &self.rest[2..2 + len];
                if !name.is_empty() && name.bytes().all(|b| b.is_ascii_lowercase() || b == b'_') {
                    self.rest = &self.rest[len + 4..];
                    return Some(Piece::Slot(name));
                }
            }
            let (text, rest) = self.rest.split_at(2);
            self.rest = rest;
            return Some(Piece::Text(text));
        }
        let text = self.rest;
        self.rest = "";
        Some(Piece::Text(text))
    }
}

pub(crate) fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Substitutes every slot of `template`. Every declared slot must be
/// supplied and no others may be.
pub fn render_template<S: AsRef<str>>(template: TemplateId, slots: &BTreeMap<&str, S>) -> Result<RenderedPrompt, PromptError> {
    let declared = template.slots();
    if let Some(extra) = slots.keys().find(|k| !declared.contains(k)) {
        return Err(PromptError::UnexpectedSlot { template, slot: extra.to_string() });
    }
    let mut text = String::with_capacity(template.body().len());
    let mut hashes = BTreeMap::new();
    for piece in Pieces::new(template.body()) {
        match piece {
            Piece::Text(t) => text.push_str(t),
            Piece::Slot(name) => {
                let value = slots
                    .get(name)
                    .ok_or_else(|| PromptError::MissingSlot { template, slot: name.to_string() })?
                    .as_ref();
                text.push_str(value);
                hashes.entry(name.to_string()).or_insert_with(|| digest(value));
            }
        }
    }
    Ok(RenderedPrompt { template, text, slots: hashes })
}

/// Convenience for call sites that build slots inline.
pub fn render(template: TemplateId, slots: &[(&str, &str)]) -> Result<RenderedPrompt, PromptError> {
    let map: BTreeMap<&str, &str> = slots.iter().copied().collect();
    render_template(template, &map)
}

/// Bracketed row-list form, one row per line:
///
/// ```text
/// [[1, 2],
/// [3, 4]]
/// ```
pub fn render_grid_text(grid: &Grid) -> String {
    let rows: Vec<String> = grid
        .rows()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(",\n"))
}

#[derive(Debug, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub slots: Vec<String>,
    pub sha256: String,
    pub origin: String,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct Manifest {
    pub normalization: String,
    pub templates: Vec<ManifestEntry>,
}

pub fn manifest() -> Manifest {
    serde_json::from_str(MANIFEST).expect("template manifest is valid JSON")
}

/// Content hash of an embedded asset, addressed by its manifest file path.
pub fn asset_digest(file: &str) -> Option<String> {
    if let Some(t) = TemplateId::ALL.iter().find(|t| t.file() == file) {
        return Some(digest(t.body()));
    }
    Category::ALL.iter().find(|c| c.file() == file).map(|c| digest(c.prompt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_text_forms() {
        assert_eq!(render_grid_text(&Grid::from_rows(&[[0]]).unwrap()), "[[0]]");
        assert_eq!(render_grid_text(&Grid::from_rows(&[[1, 2], [3, 4]]).unwrap()), "[[1, 2],\n[3, 4]]");
    }

    #[test]
    fn missing_and_unexpected_slots() {
        assert_eq!(
            render(TemplateId::CotOneShotExample, &[]),
            Err(PromptError::MissingSlot { template: TemplateId::CotOneShotExample, slot: "one_shot_data".into() })
        );
        assert!(matches!(
            render(TemplateId::CotOneShotData, &[("x", "y")]),
            Err(PromptError::UnexpectedSlot { .. })
        ));
        assert!(matches!("nope".parse::<TemplateId>(), Err(PromptError::UnknownTemplate(_))));
        assert_eq!("tot_step_vote".parse::<TemplateId>(), Ok(TemplateId::TotStepVote));
    }

    #[test]
    fn slot_lists() {
        assert_eq!(TemplateId::Cot.slots(), vec!["one_shot_example", "demo_examples", "test_input"]);
        assert_eq!(TemplateId::Itp.slots(), vec!["category_prompt", "example_pairs", "target_output", "answers"]);
        assert!(TemplateId::DslFunctions.slots().is_empty());
    }

    #[test]
    fn substitution_is_single_pass() {
        let r = render(TemplateId::CotOneShotExample, &[("one_shot_data", "{{one_shot_data}}")]).unwrap();
        assert!(r.text.contains("{{one_shot_data}}"));
        assert_eq!(r.slots["one_shot_data"], digest("{{one_shot_data}}"));
    }
}
