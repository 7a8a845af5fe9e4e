use std::collections::BTreeMap;

use arcbench_core::TokenCost;
use serde::Deserialize;

use super::{Exchange, GatewayError};

/// Per-token prices for one model.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct Prices {
    pub input: f64,
    pub output: f64,
}

/// Price table keyed by model name, read from TOML:
///
/// ```toml
/// [models."gpt-4"]
/// input = 0.00003
/// output = 0.00006
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
pub struct PriceTable {
    pub models: BTreeMap<String, Prices>,
}

impl PriceTable {
    pub fn from_toml(text: &str) -> Result<PriceTable, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn get(&self, model: &str) -> Option<Prices> {
        self.models.get(model).copied()
    }
}

pub fn whitespace_tokens(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

/// Prices one exchange with an injected token counter.
pub fn account(exchange: &Exchange, tokenizer: impl Fn(&str) -> u64, prices: &PriceTable) -> Result<TokenCost, GatewayError> {
    let p = prices.get(&exchange.request.model).ok_or_else(|| GatewayError::UnknownModel(exchange.request.model.clone()))?;
    Ok(TokenCost::new(tokenizer(&exchange.request.prompt), tokenizer(&exchange.response), p.input, p.output))
}
