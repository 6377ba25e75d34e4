//! Flag values layered over an optional `key = value` config file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use tur_core::io::{apply_optimizer_keys, parse_config};
use tur_core::optimizer::OptimizerConfig;

/// Config-file entries with keys normalized to underscores.
#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_text(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let file = parse_config(text)?
            .into_iter()
            .map(|(k, v)| (normalize(&k), v))
            .collect();
        Ok(Self { file })
    }

    /// The flag if given, else the config entry, else `None`.
    pub fn get<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(&normalize(key))
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| anyhow!("config: bad value for {key}: '{v}'"))
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    /// A switch is on when given on the command line or set to true in the file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.get::<bool>(None, key)?.unwrap_or(false))
    }

    /// Optimizer settings from the file, with `seed` taken from the
    /// command line when present.
    pub fn optimizer(&self, seed: Option<u64>) -> Result<OptimizerConfig> {
        let mut config = OptimizerConfig::default();
        apply_optimizer_keys(&self.file, &mut config)?;
        if let Some(seed) = self.get(seed, "seed")? {
            config.seed = seed;
        }
        Ok(config)
    }
}
