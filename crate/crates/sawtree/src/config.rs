//! Flat `key = value` experiment configs.
//!
//! One pair per line; `#` starts a comment. The key `experiment` names the
//! recipe. Every key a recipe reads, including the ones left at their
//! defaults, ends up in the canonical text, so a config recovered from a
//! report reruns the exact same experiment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{AppError, AppResult};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    params: BTreeMap<String, String>,
    read: BTreeSet<String>,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        ExperimentConfig { experiment: experiment.to_string(), params: BTreeMap::new(), read: BTreeSet::new() }
    }

    pub fn parse(text: &str) -> AppResult<Self> {
        let mut experiment = None;
        let mut params = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| AppError::Config { line: i + 1, msg };
            let (k, v) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(err("empty key".into()));
            }
            if k == "experiment" {
                if experiment.replace(v.to_string()).is_some() {
                    return Err(err("experiment given twice".into()));
                }
            } else if params.insert(k.to_string(), v.to_string()).is_some() {
                return Err(err(format!("duplicate key {k:?}")));
            }
        }
        let experiment = experiment.ok_or(AppError::Config { line: 0, msg: "missing experiment = <id>".into() })?;
        Ok(ExperimentConfig { experiment, params, read: BTreeSet::new() })
    }

    pub fn set(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Reads `key`, recording `default` when absent.
    pub fn get<T: FromStr>(&mut self, key: &str, default: impl Display) -> AppResult<T> {
        self.read.insert(key.to_string());
        let v = self.params.entry(key.to_string()).or_insert_with(|| default.to_string());
        v.parse().map_err(|_| AppError::Config { line: 0, msg: format!("bad value {v:?} for {key}") })
    }

    /// Comma separated list.
    pub fn get_list<T: FromStr>(&mut self, key: &str, default: &str) -> AppResult<Vec<T>> {
        let raw: String = self.get(key, default)?;
        raw.split(',')
            .map(|s| s.trim().parse().map_err(|_| AppError::Config { line: 0, msg: format!("bad list item {s:?} in {key}") }))
            .collect()
    }

    /// Fails on keys no recipe step asked for.
    pub fn check_unused(&self) -> AppResult<()> {
        match self.params.keys().find(|k| !self.read.contains(*k)) {
            Some(k) => Err(AppError::Config { line: 0, msg: format!("unknown key {k:?} for {}", self.experiment) }),
            None => Ok(()),
        }
    }

    pub fn canonical(&self) -> String {
        let mut s = format!("experiment = {}\n", self.experiment);
        for (k, v) in &self.params {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn sha256(&self) -> String {
        sha256_hex(self.canonical().as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_canonical() {
        let mut c = ExperimentConfig::parse("# scan\nexperiment = continuity-scan\nn=40 # depth\n\n  seed = 7\n").unwrap();
        assert_eq!(c.get::<usize>("n", 1).unwrap(), 40);
        assert_eq!(c.get::<f64>("lambda_step", 0.02).unwrap(), 0.02);
        assert!(c.check_unused().is_err());
        assert_eq!(c.get::<u64>("seed", 0).unwrap(), 7);
        c.check_unused().unwrap();
        let text = c.canonical();
        assert_eq!(text, "experiment = continuity-scan\nlambda_step = 0.02\nn = 40\nseed = 7\n");
        let again = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(again.sha256(), c.sha256());
    }

    #[test]
    fn errors() {
        assert!(ExperimentConfig::parse("n = 3").is_err());
        assert!(ExperimentConfig::parse("experiment = a\nn = 1\nn = 2").is_err());
        assert!(ExperimentConfig::parse("experiment = a\nnonsense").is_err());
        let mut c = ExperimentConfig::parse("experiment = a\nn = x").unwrap();
        assert!(c.get::<usize>("n", 1).is_err());
        assert_eq!(c.get_list::<u32>("cp", "1, 2,3").unwrap(), vec![1, 2, 3]);
    }
}
