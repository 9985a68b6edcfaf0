//! Flat `key = value` experiment files.
//!
//! ```text
//! # global keys
//! env = synthetic
//! T = 2000
//! seeds = 0..20
//!
//! [lnucb-ta]
//! alpha0 = 0.1, 1, 10
//!
//! [linucb]
//! alpha = 0.01, 0.1, 1
//! ```
//!
//! Keys before the first section are global. Each `[policy-id]` section
//! lists that policy's parameters; a comma-separated value is a grid.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{BanditError, Result};

/// Parameters of one policy section, each a list of grid values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PolicyEntry {
    pub id: String,
    pub params: BTreeMap<String, Vec<String>>,
}

impl PolicyEntry {
    pub fn new(id: impl Into<String>) -> Self {
        PolicyEntry {
            id: id.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.params.insert(normalize_key(key), split_list(value));
    }
}

/// Parsed file: global keys plus policy sections in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawConfig {
    pub global: BTreeMap<String, String>,
    pub policies: Vec<PolicyEntry>,
}

/// Lowercase, `-` folded to `_`, so `theta-min` and `theta_min` agree.
pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// Splits a comma list, dropping empty items.
pub fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

impl RawConfig {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut config = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let bad = |message: &str| BanditError::Parse {
                path: source.to_string(),
                row: i + 1,
                message: message.to_string(),
            };
            let line = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let id = rest
                    .strip_suffix(']')
                    .ok_or_else(|| bad("unterminated section header"))?
                    .trim();
                if id.is_empty() {
                    return Err(bad("empty section name"));
                }
                config
                    .policies
                    .push(PolicyEntry::new(id.to_ascii_lowercase()));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `key = value`"))?;
            if key.trim().is_empty() {
                return Err(bad("empty key"));
            }
            match config.policies.last_mut() {
                Some(section) => section.set(key, value),
                None => {
                    config
                        .global
                        .insert(normalize_key(key), value.trim().to_string());
                }
            }
        }
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| BanditError::io(path, e))?;
        RawConfig::parse(&text, &path.display().to_string())
    }
}

/// Parses `7`, `1,2,3` or the half-open range `0..20`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || BanditError::param("seeds", format!("expected N, a,b,c or a..b, got {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a >= b {
            return Err(bad());
        }
        return Ok((a..b).collect());
    }
    let seeds = split_list(s)
        .iter()
        .map(|v| v.parse().map_err(|_| bad()))
        .collect::<Result<Vec<u64>>>()?;
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_grids() {
        let text = "env = synthetic # trailing\nT=100\n\n[LNUCB-TA]\nalpha0 = 0.1, 1 ,10\ntheta-min = 2\n[linucb]\nalpha=1\n";
        let c = RawConfig::parse(text, "x").unwrap();
        assert_eq!(c.global["env"], "synthetic");
        assert_eq!(c.global["t"], "100");
        assert_eq!(c.policies.len(), 2);
        assert_eq!(c.policies[0].id, "lnucb-ta");
        assert_eq!(c.policies[0].params["alpha0"], vec!["0.1", "1", "10"]);
        assert_eq!(c.policies[0].params["theta_min"], vec!["2"]);
    }

    #[test]
    fn malformed_lines_name_the_row() {
        match RawConfig::parse("env = a\nnonsense\n", "cfg") {
            Err(BanditError::Parse { row, path, .. }) => {
                assert_eq!((row, path.as_str()), (2, "cfg"))
            }
            other => panic!("{other:?}"),
        }
        assert!(RawConfig::parse("[open\n", "cfg").is_err());
        assert!(RawConfig::parse("[]\n", "cfg").is_err());
    }

    #[test]
    fn seed_forms() {
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("1, 2,3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_seeds("0..4").unwrap(), vec![0, 1, 2, 3]);
        assert!(parse_seeds("4..4").is_err());
        assert!(parse_seeds("x").is_err());
        assert!(parse_seeds("").is_err());
    }
}
