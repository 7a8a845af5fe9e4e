//! Valid-example ratios with exact rational arithmetic.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::StatsError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityLedgerEntry {
    pub category: String,
    pub generated: u64,
    pub valid: u64,
}

impl ValidityLedgerEntry {
    pub fn new(category: impl Into<String>, generated: u64, valid: u64) -> Self {
        ValidityLedgerEntry { category: category.into(), generated, valid }
    }
}

/// A percentage held exactly, shown rounded half-up to two decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent(Ratio<u64>);

impl Percent {
    /// `100 · num / den`.
    pub fn of(num: u64, den: u64) -> Percent {
        Percent(Ratio::new(num * 100, den))
    }

    pub fn exact(self) -> Ratio<u64> {
        self.0
    }

    /// Hundredths of a percent, rounded half-up: 24/346 gives 694.
    pub fn hundredths(self) -> u64 {
        (self.0 * 100).round().to_integer()
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.hundredths();
        write!(f, "{}.{:02}%", h / 100, h % 100)
    }
}

impl Serialize for Percent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let h = self.hundredths();
        s.serialize_str(&format!("{}.{:02}", h / 100, h % 100))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryRatio {
    pub category: String,
    pub generated: u64,
    pub valid: u64,
    pub percent: Percent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub categories: Vec<CategoryRatio>,
    pub total_generated: u64,
    pub total_valid: u64,
    /// Pooled over counts, not averaged over categories.
    pub total: Percent,
}

pub fn validity_ratio(ledger: &[ValidityLedgerEntry]) -> Result<ValidityReport, StatsError> {
    let mut categories = Vec::with_capacity(ledger.len());
    for e in ledger {
        if e.generated == 0 {
            return Err(StatsError::ZeroGenerated(e.category.clone()));
        }
        if e.valid > e.generated {
            return Err(StatsError::ValidExceedsGenerated { category: e.category.clone(), generated: e.generated, valid: e.valid });
        }
        categories.push(CategoryRatio {
            category: e.category.clone(),
            generated: e.generated,
            valid: e.valid,
            percent: Percent::of(e.valid, e.generated),
        });
    }
    let total_generated: u64 = ledger.iter().map(|e| e.generated).sum();
    let total_valid: u64 = ledger.iter().map(|e| e.valid).sum();
    if total_generated == 0 {
        return Err(StatsError::EmptyInput);
    }
    Ok(ValidityReport { categories, total_generated, total_valid, total: Percent::of(total_valid, total_generated) })
}
