//! Experiment pipelines. Each one renders prompts, calls the gateway and
//! scores what comes back against the task's test output.

mod coherence;
mod dsl;
mod itp;
mod reasoning;

use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::gateway::{Exchange, GatewayError, GenParams, Gateway};
use arcbench_core::prompt::{PromptError, RenderedPrompt};
use arcbench_core::task::TaskError;

pub use coherence::{run_inferential_coherence, CoherenceOutcome};
pub use dsl::{buckets_from_outcomes, parse_steps, run_dsl_composition, run_dsl_understanding, UnderstandingOutcome};
pub use itp::{run_itp, validity_ledger, GenerationRecord, ItpOutcome, Verdict};
pub use reasoning::{parse_decomposition, parse_vote, run_cot, run_ltm, run_tot, TotParams, VoteKind};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("task {task_id}: {source}")]
    Gateway { task_id: String, source: GatewayError },
    #[error("task {0} has no augmented examples")]
    MissingAugmentation(String),
    #[error("task {0} has no human description")]
    MissingDescription(String),
    #[error("task {0}: no candidate grids in any response")]
    NoCandidatesExtracted(String),
    #[error("task {0} changes grid size")]
    SizeChangingTask(String),
    #[error("task {task_id}: {reason}")]
    InvalidInput { task_id: String, reason: String },
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Task(#[from] TaskError),
}

/// The gateway plus the generation settings a pipeline sends with every call.
pub struct Runner<'a> {
    pub gateway: &'a Gateway,
    pub params: GenParams,
}

impl<'a> Runner<'a> {
    pub fn new(gateway: &'a Gateway, params: GenParams) -> Self {
        Runner { gateway, params }
    }

    pub(crate) fn ask(&self, task_id: &str, prompt: &RenderedPrompt) -> Result<Exchange, HarnessError> {
        self.gateway.complete(prompt, &self.params).map_err(|source| HarnessError::Gateway { task_id: task_id.to_string(), source })
    }
}

pub(crate) fn cached_regex(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("pattern compiles"))
}
