use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::StatsError;

/// Subjects (rows, tasks) by items (columns, repeated iterations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityMatrix<F> {
    rows: Vec<Vec<F>>,
    items: usize,
}

impl<F: Float> ReliabilityMatrix<F> {
    pub fn new(rows: Vec<Vec<F>>) -> Result<Self, StatsError> {
        let items = rows.first().map(Vec::len).ok_or(StatsError::EmptyInput)?;
        if items < 2 {
            return Err(StatsError::TooFewItems(items));
        }
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != items) {
            return Err(StatsError::Ragged { row, expected: items, found: r.len() });
        }
        Ok(ReliabilityMatrix { rows, items })
    }

    /// Binary outcomes, `true` as 1.
    pub fn from_outcomes(rows: &[Vec<bool>]) -> Result<Self, StatsError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| if v { F::one() } else { F::zero() }).collect()).collect())
    }

    pub fn subjects(&self) -> usize {
        self.rows.len()
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn rows(&self) -> &[Vec<F>] {
        &self.rows
    }
}

fn variance<F: Float>(values: impl Iterator<Item = F> + Clone) -> F {
    let n = F::from(values.clone().count()).expect("count fits");
    let mean = values.clone().fold(F::zero(), |a, v| a + v) / n;
    values.fold(F::zero(), |a, v| a + (v - mean) * (v - mean)) / n
}

/// `k/(k−1) · (1 − Σ item variance / total-score variance)`.
///
/// Population variances are used throughout; the normalisation cancels in
/// the ratio.
pub fn cronbach_alpha<F: Float>(m: &ReliabilityMatrix<F>) -> Result<F, StatsError> {
    let k = F::from(m.items).expect("item count fits");
    let item_var = (0..m.items).fold(F::zero(), |acc, j| acc + variance(m.rows.iter().map(|r| r[j])));
    let total_var = variance(m.rows.iter().map(|r| r.iter().fold(F::zero(), |a, &v| a + v)));
    if total_var <= F::zero() {
        return Err(StatsError::DegenerateVariance);
    }
    Ok(k / (k - F::one()) * (F::one() - item_var / total_var))
}
