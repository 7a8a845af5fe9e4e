use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TokenCost<F> {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub unit_price_in: F,
    pub unit_price_out: F,
    pub total: F,
}

impl<F: Float> TokenCost<F> {
    pub fn new(prompt_tokens: u64, completion_tokens: u64, unit_price_in: F, unit_price_out: F) -> Self {
        let total = F::from(prompt_tokens).expect("fits") * unit_price_in + F::from(completion_tokens).expect("fits") * unit_price_out;
        TokenCost { prompt_tokens, completion_tokens, unit_price_in, unit_price_out, total }
    }
}

/// Accumulated cost of every generation exchange divided by the number of
/// valid examples they produced.
pub fn cost_per_valid<F: Float>(costs: &[TokenCost<F>], valid: u64) -> Result<F, StatsError> {
    cost_per_valid_total(costs.iter().fold(F::zero(), |a, c| a + c.total), valid)
}

pub fn cost_per_valid_total<F: Float>(total: F, valid: u64) -> Result<F, StatsError> {
    if valid == 0 {
        return Err(StatsError::NoValidExamples);
    }
    Ok(total / F::from(valid).expect("fits"))
}
