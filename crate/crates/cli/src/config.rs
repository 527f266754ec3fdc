//! Flag/config-file resolution and value parsing.
//!
//! A config file is a flat JSON object whose keys are flag names (`t-eq` or
//! `t_eq`). Command-line flags take precedence over file values.

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{Map, Value};

/// Values from an optional config file, consumed key by key.
pub struct FileValues {
    map: Map<String, Value>,
}

impl FileValues {
    pub fn empty() -> FileValues {
        FileValues { map: Map::new() }
    }

    pub fn load(path: Option<&Path>) -> Result<FileValues> {
        let Some(path) = path else {
            return Ok(FileValues::empty());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
        let value: Value = serde_json::from_str(&text).with_context(|| format!("invalid JSON in {}", path.display()))?;
        let Value::Object(obj) = value else {
            bail!("config file {} must hold a JSON object", path.display());
        };
        let map = obj.into_iter().map(|(k, v)| (k.replace('_', "-"), v)).collect();
        Ok(FileValues { map })
    }

    /// Raw text of `key`, removed from the file values. Arrays become comma lists.
    fn take_text(&mut self, key: &str) -> Result<Option<String>> {
        let Some(v) = self.map.remove(key) else {
            return Ok(None);
        };
        let scalar = |v: &Value| -> Result<String> {
            match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                Value::Bool(b) => Ok(b.to_string()),
                other => Err(anyhow!("config key {key}: unsupported value {other}")),
            }
        };
        Ok(Some(match &v {
            Value::Array(items) => items.iter().map(scalar).collect::<Result<Vec<_>>>()?.join(","),
            other => scalar(other)?,
        }))
    }

    /// Flag value if given, otherwise the file value parsed as `T`.
    pub fn pick<T>(&mut self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        let from_file = self.take_text(key)?;
        if flag.is_some() {
            return Ok(flag);
        }
        from_file
            .map(|s| s.parse::<T>().map_err(|e| anyhow!("config key {key}: {e}")))
            .transpose()
    }

    pub fn pick_flag(&mut self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }

    /// Fails on keys no flag consumed, which are almost always typos.
    pub fn finish(self) -> Result<()> {
        if let Some(k) = self.map.keys().next() {
            bail!("unknown config key {k:?}");
        }
        Ok(())
    }
}

/// Comma list of values; integer items may also be inclusive ranges `a:b`.
pub fn parse_list<T>(text: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim) {
        if item.is_empty() {
            bail!("empty item in list {text:?}");
        }
        out.push(item.parse::<T>().map_err(|e| anyhow!("bad item {item:?}: {e}"))?);
    }
    Ok(out)
}

pub fn parse_int_list(text: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim) {
        match item.split_once(':') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (
                    a.trim().parse().map_err(|e| anyhow!("bad range start {a:?}: {e}"))?,
                    b.trim().parse().map_err(|e| anyhow!("bad range end {b:?}: {e}"))?,
                );
                if a > b {
                    bail!("empty range {item:?}");
                }
                out.extend(a..=b);
            }
            None => out.extend(parse_list::<u64>(item)?),
        }
    }
    Ok(out)
}
