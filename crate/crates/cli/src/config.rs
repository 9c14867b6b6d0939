//! `key = value` defaults. Keys are long flag names without the dashes.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "mode", "cap-ell", "cap-k", "cap-n", "cap-t", "candidates", "seed", "budget", "c", "stages", "bases",
    "checkpoints", "start", "step", "exact-cap", "block-ell", "exact",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Invalid(format!("config line {}: expected 'key = value'", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(CliError::Invalid(format!("config line {}: unknown key '{}'", i + 1, k)));
            }
            values.insert(k.to_string(), v.to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    /// The flag if given, else the config value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(s) => s.parse().map_err(|e| CliError::Invalid(format!("config key '{}': {}", key, e))),
            None => Ok(default),
        }
    }

    pub fn pick_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|s| s.parse().map_err(|e| CliError::Invalid(format!("config key '{}': {}", key, e))))
            .transpose()
    }

    pub fn flag(&self, given: bool, key: &str) -> CliResult<bool> {
        if given {
            return Ok(true);
        }
        self.pick(None, key, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let c = Config::parse("seed = 9\n# comment\ncap-ell=40  # trailing\n").unwrap();
        assert_eq!(c.pick(Some(3u64), "seed", 0).unwrap(), 3);
        assert_eq!(c.pick(None, "seed", 0u64).unwrap(), 9);
        assert_eq!(c.pick(None, "cap-ell", 64u64).unwrap(), 40);
        assert_eq!(c.pick(None, "cap-k", 2u32).unwrap(), 2);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(Config::parse("colour = red").is_err());
        assert!(Config::parse("seed").is_err());
        let c = Config::parse("seed = x").unwrap();
        assert!(c.pick(None, "seed", 0u64).is_err());
    }
}
