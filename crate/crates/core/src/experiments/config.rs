use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Ordered `key = value` pairs with the line they came from (0 for overrides).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigEntries {
    pub entries: Vec<(String, String, usize)>,
}

impl ConfigEntries {
    /// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "empty key".into(),
                });
            }
            entries.push((k.to_string(), v.trim().to_string(), i + 1));
        }
        Ok(ConfigEntries { entries })
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::from(e).context(path.display().to_string()))?;
        Self::parse(&text)
    }

    /// Appends a `key=value` override.
    pub fn push_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "override `{assignment}` is not of the form key=value"
            ))
        })?;
        self.entries
            .push((k.trim().to_string(), v.trim().to_string(), 0));
        Ok(())
    }

    /// Last value given for `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }
}

fn where_(line: usize) -> String {
    if line == 0 {
        "override".into()
    } else {
        format!("line {line}")
    }
}

pub(crate) fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| {
        Error::Config(format!(
            "{}: cannot parse `{value}` for `{key}`",
            where_(line)
        ))
    })
}

pub(crate) fn parse_list<T: FromStr>(key: &str, value: &str, line: usize) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s, line))
        .collect()
}

pub(crate) fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "{}: `{key}` expects a boolean, got `{value}`",
            where_(line)
        ))),
    }
}

pub(crate) fn parse_path(value: &str) -> Option<PathBuf> {
    if value.is_empty() || value == "none" {
        None
    } else {
        Some(PathBuf::from(value))
    }
}
