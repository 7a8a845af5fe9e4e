//! Experiment harness: model gateway, answer extraction, pipelines, plan
//! execution and reports.

pub mod extract;
pub mod gateway;
pub mod pipelines;
pub mod plan;
pub mod report;
pub mod review;
pub mod run;

pub use extract::{extract_grid, extract_grids};
pub use pipelines::{HarnessError, Runner};
pub use plan::{ExperimentPlan, PlanError, PlanPipeline};
pub use run::{execute_plan, experiment_dir, RunError, RunSummary};
