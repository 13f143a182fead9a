//! Key-value text configuration files.
//!
//! Grammar: one `key = value` per line; blank lines and lines starting with
//! `#` are skipped. Lists are comma-separated (`gammas = 1, 2, 4`); matrices
//! additionally split rows on `;` (`matrix = 0.5, 0.1; 0.1, 0.02`).
//! Duplicate keys are rejected so a typo can't silently half-apply.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(Error::Parse {
                line: idx + 1,
                msg: format!("expected `key = value`, got {trimmed:?}"),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "empty key".into(),
                });
            }
            if entries
                .insert(key.clone(), (value.trim().to_string(), idx + 1))
                .is_some()
            {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("duplicate key {key:?}"),
                });
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Errors on the first key not in `known` (catches config typos early).
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        for (key, (_, line)) in &self.entries {
            if !known.contains(&key.as_str()) {
                return Err(Error::Parse {
                    line: *line,
                    msg: format!("unknown key {key:?}; expected one of {known:?}"),
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn parse_scalar<T: FromStr>(&self, key: &str, raw: &str) -> Result<T> {
        let line = self.entries[key].1;
        raw.trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!(
                "value {raw:?} for key {key:?} is not a valid {}",
                std::any::type_name::<T>()
            ),
        })
    }

    /// Typed scalar lookup; `Ok(None)` when the key is absent.
    pub fn scalar<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => self.parse_scalar(key, raw).map(Some),
        }
    }

    pub fn scalar_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.scalar(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.scalar(key)?
            .ok_or_else(|| Error::invalid(format!("missing required config key {key:?}")))
    }

    /// Comma-separated list. An absent key yields `Ok(None)`; an empty value
    /// is an error (write the key only when it carries items).
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(raw) = self.get(key) else {
            return Ok(None);
        };
        let line = self.entries[key].1;
        if raw.trim().is_empty() {
            return Err(Error::Parse {
                line,
                msg: format!("key {key:?} has an empty list"),
            });
        }
        raw.split(',')
            .map(|tok| self.parse_scalar(key, tok))
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    pub fn list_or<T: FromStr>(&self, key: &str, default: Vec<T>) -> Result<Vec<T>> {
        Ok(self.list(key)?.unwrap_or(default))
    }

    /// Semicolon-separated rows of comma-separated numbers.
    pub fn matrix(&self, key: &str) -> Result<Option<Vec<Vec<f64>>>> {
        let Some(raw) = self.get(key) else {
            return Ok(None);
        };
        let line = self.entries[key].1;
        let rows: Result<Vec<Vec<f64>>> = raw
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|tok| self.parse_scalar(key, tok))
                    .collect()
            })
            .collect();
        let rows = rows?;
        if rows.iter().any(Vec::is_empty) {
            return Err(Error::Parse {
                line,
                msg: format!("key {key:?} has an empty matrix row"),
            });
        }
        Ok(Some(rows))
    }
}
