//! `key = value` configuration files. Command-line flags take precedence over
//! file entries, which take precedence over built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

const KNOWN_KEYS: &[&str] = &[
    "threads",
    "samples",
    "seed",
    "na",
    "nb",
    "hab",
    "ha",
    "ref-ha",
    "t-steps",
    "tp-steps",
    "t-max",
    "tp-max",
    "transverse-ratio",
    "refine-tol",
    "steps",
    "sizes",
    "kinds",
    "split",
    "reference",
    "at",
];

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{}`", n + 1, k.trim()));
            }
            entries.insert(key, v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.entries
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Parse(format!("config key `{key}`: {e}"))))
            .transpose()
    }

    /// `flag`, else the file entry for `key`, else `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }
}

/// Parses a comma-separated list.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|e| CliError::Parse(format!("list entry `{p}`: {e}"))))
        .collect()
}
