//! `key = value` files mirroring the command-line flags.
//!
//! One pair per line; `#` starts a comment; keys are flag names without the
//! leading dashes (`n-list`, `precision-bits`, ...). Underscores are accepted
//! in place of dashes.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

/// Every key a config file may set.
pub const KEYS: [&str; 19] = [
    "b",
    "n",
    "z",
    "method",
    "precision-bits",
    "check",
    "max-degree",
    "n-list",
    "grid",
    "out",
    "format",
    "timing",
    "quantity",
    "r",
    "eta-e",
    "c-c",
    "eta-b",
    "m-right",
    "szego",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key {key:?}", i + 1);
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("line {}: duplicate key {key:?}", i + 1);
            }
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| anyhow!("config key {key}: {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let c = Config::parse("# sweep\nb = 1.5\nn_list=50,100 # degrees\n\nformat = jsonl\n").unwrap();
        assert_eq!(c.get::<f64>("b").unwrap(), Some(1.5));
        assert_eq!(c.get::<String>("n-list").unwrap().as_deref(), Some("50,100"));
        assert_eq!(c.get::<String>("format").unwrap().as_deref(), Some("jsonl"));
        assert_eq!(c.get::<f64>("r").unwrap(), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Config::parse("b 1").is_err());
        assert!(Config::parse("colour = red").is_err());
        assert!(Config::parse("b = 1\nb = 2").is_err());
        assert!(Config::parse("b = x").unwrap().get::<f64>("b").is_err());
    }
}
