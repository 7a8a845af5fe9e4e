//! Core model for ARC reasoning experiments.
//!
//! The crate holds everything that is pure computation: the grid and task
//! model, connected-component object extraction, the 19-operation grid DSL
//! with its step-limited session rules, the prompt template set, and the
//! statistics used to score experiments.
//!
//! Statistics are generic over the float type through [`num_traits::Float`];
//! the aliases at the crate root pin the `f64` instantiations used by the
//! harness and the CLI.

pub mod dsl;
pub mod grid;
pub mod objects;
pub mod prompt;
pub mod record;
pub mod stats;
pub mod task;

pub use dsl::{DslCall, DslOp, Session, SessionStatus, StepResult, Trajectory};
pub use grid::{grids_equal, validate_grid, Color, Grid, GridViolation};
pub use objects::{extract_objects, ArcObject, ColorMode, Connectivity, ObjectSet};
pub use prompt::{render_grid_text, RenderedPrompt, TemplateId};
pub use record::{Condition, EvalRecord, Pipeline};
pub use task::{ExamplePair, Task, TaskSource};

/// `f64` length bucket.
pub type LengthBucket = stats::LengthBucket<f64>;
/// `f64` composition estimate.
pub type CompositionEstimate = stats::CompositionEstimate<f64>;
/// `f64` reliability matrix.
pub type ReliabilityMatrix = stats::ReliabilityMatrix<f64>;
/// `f64` accuracy distribution.
pub type AccuracyDistribution = stats::AccuracyDistribution<f64>;
/// `f64` token cost.
pub type TokenCost = stats::TokenCost<f64>;
/// `f32` length bucket, for callers that store accuracies compactly.
pub type LengthBucketF32 = stats::LengthBucket<f32>;
