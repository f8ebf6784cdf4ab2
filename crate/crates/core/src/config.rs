//! Flat `key = value` configuration with `[section]` headers.
//!
//! ```text
//! # comment
//! [stability]
//! theta = 0.5
//! ```
//!
//! Keys are addressed as `section.key`; any of them can be overridden with
//! [`Config::set`] (the `--set` flag of the binary).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Config {
                    line: i + 1,
                    message: format!("unterminated section header `{line}`"),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            if section.is_empty() {
                return Err(Error::Config {
                    line: i + 1,
                    message: format!("key `{}` outside of any section", key.trim()),
                });
            }
            cfg.insert(&section, key.trim(), value.trim());
        }
        Ok(cfg)
    }

    fn insert(&mut self, section: &str, key: &str, value: &str) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.to_string());
    }

    /// Applies `section.key=value`.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let bad = || Error::Config {
            line: 0,
            message: format!("override `{assignment}` is not of the form section.key=value"),
        };
        let (path, value) = assignment.split_once('=').ok_or_else(bad)?;
        let (section, key) = path.trim().split_once('.').ok_or_else(bad)?;
        if section.is_empty() || key.is_empty() {
            return Err(bad());
        }
        self.insert(section, key, value.trim());
        Ok(())
    }

    pub fn with(mut self, section: &str, key: &str, value: impl ToString) -> Self {
        self.insert(section, key, &value.to_string());
        self
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str).filter(|v| !v.is_empty())
    }

    /// Parses `section.key` if present.
    pub fn parse_opt<T>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.get(section, key)
            .map(|v| {
                v.parse::<T>().map_err(|e| Error::Config {
                    line: 0,
                    message: format!("{section}.{key} = `{v}`: {e}"),
                })
            })
            .transpose()
    }

    pub fn parse_or<T>(&self, section: &str, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        Ok(self.parse_opt(section, key)?.unwrap_or(default))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.sections
            .iter()
            .flat_map(|(s, kv)| kv.iter().map(move |(k, v)| (s.as_str(), k.as_str(), v.as_str())))
    }

    pub fn section(&self, section: &str) -> impl Iterator<Item = (&str, &str)> {
        self.sections
            .get(section)
            .into_iter()
            .flatten()
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Rejects keys outside `known` (pairs of section and key; a key of
    /// `*` accepts the whole section).
    pub fn check_keys(&self, known: &[(&str, &str)]) -> Result<()> {
        for (s, k, _) in self.entries() {
            if !known.iter().any(|(ks, kk)| *ks == s && (*kk == "*" || *kk == k)) {
                return Err(Error::Config {
                    line: 0,
                    message: format!("unknown key `{s}.{k}`"),
                });
            }
        }
        Ok(())
    }
}

/// Canonical text form: sections and keys in sorted order.
impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (section, kv) in &self.sections {
            if !first {
                writeln!(f)?;
            }
            first = false;
            writeln!(f, "[{section}]")?;
            for (k, v) in kv {
                writeln!(f, "{k} = {v}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_override_and_roundtrip() {
        let text = "# run\n[stability]\ntheta = 0.5\n\n[detection]\nk_pos=30\n";
        let mut c = Config::parse(text).unwrap();
        assert_eq!(c.get("stability", "theta"), Some("0.5"));
        c.set("stability.theta=0.7").unwrap();
        c.set("input.layers = a b.csv").unwrap();
        assert_eq!(c.parse_or("stability", "theta", 0.0).unwrap(), 0.7);
        assert_eq!(c.get("input", "layers"), Some("a b.csv"));
        assert_eq!(Config::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(Config::parse("theta = 1"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(Config::parse("[a]\nnonsense"), Err(Error::Config { line: 2, .. })));
        assert!(Config::new().set("novalue").is_err());
        let c = Config::new().with("stability", "theta", "x");
        assert!(c.parse_opt::<f64>("stability", "theta").is_err());
        assert!(c.check_keys(&[("stability", "seed")]).is_err());
        assert!(c.check_keys(&[("stability", "*")]).is_ok());
    }
}
