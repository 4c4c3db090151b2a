//! Effective configuration: config file, then flags, as one flat key map.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::UsageError;

/// Keys understood anywhere; the config file may only use these.
pub const KNOWN_KEYS: &[&str] = &[
    "alpha", "band", "c", "c-bar", "conditioning", "curve", "delta", "depth", "eps", "format",
    "gamma", "graph", "jobs", "ks-n", "ks-samples", "l", "level", "m", "m-max", "min-obs", "n",
    "n-grid", "n-max", "observable", "out", "p", "precision", "r", "reps", "requirement", "seed",
    "slack", "t", "t-grid", "t-max", "times", "tol", "vertex-cap", "x-grid",
];

/// Keys that select where and how output goes, or how fast it is produced;
/// they are not echoed because they cannot change any number.
const NOT_ECHOED: &[&str] = &["jobs", "out", "format"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    /// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
    pub fn from_config_text(text: &str) -> Result<Self, UsageError> {
        let mut params = Params::default();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                UsageError(format!("config line {}: expected key=value, got {raw:?}", number + 1))
            })?;
            params.set(key.trim(), value.trim())?;
        }
        Ok(params)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(UsageError(format!("unknown key {key:?}")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| UsageError(format!("--{key} {v:?}: {e}"))))
            .transpose()
    }

    pub fn require<T>(&self, key: &str) -> Result<T, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| UsageError(format!("missing --{key}")))
    }

    /// Value or `default`; the default is recorded so the echoed config shows
    /// every value that was used.
    pub fn or<T>(&mut self, key: &str, default: T) -> Result<T, UsageError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.get(key)? {
            Some(v) => Ok(v),
            None => {
                self.values.insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    /// Whitespace- or comma-separated list.
    pub fn list<T>(&self, key: &str) -> Result<Option<Vec<T>>, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let Some(raw) = self.raw(key) else {
            return Ok(None);
        };
        raw.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<T>().map_err(|e| UsageError(format!("--{key} item {s:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn echoed(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values
            .iter()
            .filter(|(k, _)| !NOT_ECHOED.contains(&k.as_str()))
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }
}
