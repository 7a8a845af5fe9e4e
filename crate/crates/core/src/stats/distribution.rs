use std::collections::BTreeMap;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{to_f64, StatsError};
use crate::record::EvalRecord;

pub const BINS: usize = 10;

/// Per-task accuracies grouped into `[0, 0.1), ..., [0.9, 1.0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyDistribution<F> {
    pub counts: [usize; BINS],
    /// Share of tasks per bin.
    pub proportions: [F; BINS],
    /// `ccdf[i]`: share of tasks with accuracy at least `i / 10`.
    pub ccdf: [F; BINS],
}

/// Bin for an accuracy in [0, 1]; 1.0 goes to the top bin.
pub fn bin_index<F: Float>(accuracy: F) -> usize {
    let scaled = (accuracy * F::from(BINS).expect("bin count fits")).floor();
    scaled.to_usize().unwrap_or(0).min(BINS - 1)
}

pub fn accuracy_distribution<F: Float>(accuracies: &[F]) -> Result<AccuracyDistribution<F>, StatsError> {
    if accuracies.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut counts = [0usize; BINS];
    for &a in accuracies {
        if !(a >= F::zero() && a <= F::one()) {
            return Err(StatsError::InvalidAccuracy(to_f64(a)));
        }
        counts[bin_index(a)] += 1;
    }
    let total = F::from(accuracies.len()).expect("length fits");
    let proportions = counts.map(|c| F::from(c).expect("count fits") / total);
    let mut ccdf = [F::zero(); BINS];
    let mut tail = 0usize;
    for i in (0..BINS).rev() {
        tail += counts[i];
        ccdf[i] = F::from(tail).expect("count fits") / total;
    }
    Ok(AccuracyDistribution { counts, proportions, ccdf })
}

/// Fraction of correct records per task, keyed by task id.
pub fn task_accuracies<F: Float>(records: &[EvalRecord]) -> BTreeMap<String, F> {
    let mut tallies: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in records {
        let t = tallies.entry(&r.task_id).or_default();
        t.0 += usize::from(r.result_correct);
        t.1 += 1;
    }
    tallies
        .into_iter()
        .map(|(id, (ok, n))| (id.to_string(), F::from(ok).expect("fits") / F::from(n).expect("fits")))
        .collect()
}
