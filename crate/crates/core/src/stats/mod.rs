//! Scoring statistics, generic over the float type.

mod composition;
mod cost;
mod distribution;
mod reliability;
mod validity;

use thiserror::Error;

pub use composition::{estimate_ideal_accuracy, sequence_success, weighted_p, CompositionEstimate, IdealEstimate, LengthBucket, Y_TOLERANCE};
pub use cost::{cost_per_valid, cost_per_valid_total, TokenCost};
pub use distribution::{accuracy_distribution, bin_index, task_accuracies, AccuracyDistribution, BINS};
pub use reliability::{cronbach_alpha, ReliabilityMatrix};
pub use validity::{validity_ratio, CategoryRatio, Percent, ValidityLedgerEntry, ValidityReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("no input values")]
    EmptyInput,
    #[error("accuracy {0} is outside [0, 1]")]
    InvalidAccuracy(f64),
    #[error("reliability matrix needs at least two items, got {0}")]
    TooFewItems(usize),
    #[error("reliability matrix row {row} has {found} items, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("total scores have zero variance")]
    DegenerateVariance,
    #[error("bucket weights sum to zero")]
    EmptyBuckets,
    #[error("bucket n={n}: {reason}")]
    InvalidBucket { n: u32, reason: &'static str },
    #[error("{name} = {value} is outside {domain}")]
    OutOfDomain { name: &'static str, value: f64, domain: &'static str },
    #[error("observed {observed} exceeds the largest reachable value {max}")]
    NoRootInRange { observed: f64, max: f64 },
    #[error("category {0} has zero generated examples")]
    ZeroGenerated(String),
    #[error("category {category}: {valid} valid exceeds {generated} generated")]
    ValidExceedsGenerated { category: String, generated: u64, valid: u64 },
    #[error("no valid examples")]
    NoValidExamples,
}

pub(crate) fn to_f64<F: num_traits::Float>(v: F) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
