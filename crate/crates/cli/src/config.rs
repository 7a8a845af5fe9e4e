use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use arcbench_harness::gateway::{LiveConfig, PriceTable};
use serde::Deserialize;

use crate::CliError;

/// Optional `--config` file. Paths inside it are relative to the file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Price table with `[models."<name>"]` input/output per-token prices.
    pub prices: Option<PathBuf>,
    #[serde(default)]
    pub live: LiveSection,
    pub review_lease_minutes: Option<u64>,
    #[serde(skip)]
    base: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiveSection {
    pub base_url: Option<String>,
    pub max_retries: Option<u32>,
    pub timeout_secs: Option<u64>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = fs::read_to_string(path).map_err(|e| CliError::exec(format!("{}: {e}", path.display())))?;
        let mut c: Config = toml::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
        c.base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok(c)
    }

    /// Flag value first, then the config file.
    pub fn prices(&self, flag: Option<&Path>) -> Result<Option<PriceTable>, CliError> {
        let path = match (flag, &self.prices) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(p)) => self.base.join(p),
            (None, None) => return Ok(None),
        };
        let text = fs::read_to_string(&path).map_err(|e| CliError::exec(format!("{}: {e}", path.display())))?;
        PriceTable::from_toml(&text).map(Some).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
    }

    pub fn live(&self, base_url: Option<String>) -> LiveConfig {
        let mut c = LiveConfig::default();
        if let Some(url) = base_url.or_else(|| self.live.base_url.clone()) {
            c.base_url = url;
        }
        if let Some(n) = self.live.max_retries {
            c.max_retries = n;
        }
        if let Some(s) = self.live.timeout_secs {
            c.timeout = Duration::from_secs(s);
        }
        c.with_env_key()
    }
}
