//! Experiment configuration: a TOML file with one table per subcommand.
//!
//! ```toml
//! [two-slit]
//! mode = "quantum"
//! x_a = 0.5
//! expect_minima = 6
//! ```
//!
//! Absent keys take their documented defaults; unknown keys are rejected.

use anyhow::{anyhow, bail, Context, Result};
use std::cell::RefCell;
use std::collections::BTreeSet;
use std::path::Path;
use toml::{Table, Value};

/// Missing or empty configuration.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub struct Section {
    name: String,
    table: Table,
    used: RefCell<BTreeSet<String>>,
}

pub fn load(path: Option<&Path>, name: &str) -> Result<Section> {
    let path = path.ok_or_else(|| UsageError(format!("{name} needs --config with a [{name}] section")))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text, name).with_context(|| format!("config {}", path.display()))
}

pub fn parse(text: &str, name: &str) -> Result<Section> {
    if text.trim().is_empty() {
        return Err(UsageError("configuration file is empty".into()).into());
    }
    let mut doc: Table = text.parse().map_err(|e: toml::de::Error| anyhow!("{}", e.to_string().trim_end()))?;
    let table = match doc.remove(name) {
        Some(Value::Table(t)) => t,
        Some(_) => bail!("[{name}] must be a table"),
        None => return Err(UsageError(format!("configuration has no [{name}] section")).into()),
    };
    Ok(Section { name: name.into(), table, used: RefCell::new(BTreeSet::new()) })
}

impl Section {
    fn get(&self, key: &str) -> Option<&Value> {
        self.used.borrow_mut().insert(key.into());
        self.table.get(key)
    }

    fn err(&self, key: &str, want: &str, got: &Value) -> anyhow::Error {
        anyhow!("[{}] {key}: expected {want}, found {}", self.name, got.type_str())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => as_f64(v).ok_or_else(|| self.err(key, "a number", v)),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.opt_usize(key)?.unwrap_or(default))
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(v) => Err(self.err(key, "a non-negative integer", v)),
        }
    }

    pub fn str_or(&self, key: &str, default: &str) -> Result<String> {
        match self.get(key) {
            None => Ok(default.into()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(v) => Err(self.err(key, "a string", v)),
        }
    }

    pub fn str_list_or(&self, key: &str, default: &[&str]) -> Result<Vec<String>> {
        match self.get(key) {
            None => Ok(default.iter().map(|s| s.to_string()).collect()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| v.as_str().map(str::to_string).ok_or_else(|| self.err(key, "an array of strings", v)))
                .collect(),
            Some(v) => Err(self.err(key, "an array of strings", v)),
        }
    }

    /// A number or an array of numbers.
    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => {
                a.iter().map(|v| as_f64(v).ok_or_else(|| self.err(key, "an array of numbers", v))).collect()
            }
            Some(v) => Ok(vec![as_f64(v).ok_or_else(|| self.err(key, "a number or array", v))?]),
        }
    }

    /// An integer or an array of integers.
    pub fn usize_list_or(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        let one = |v: &Value| match v {
            Value::Integer(i) if *i >= 0 => Ok(*i as usize),
            _ => Err(self.err(key, "non-negative integers", v)),
        };
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a.iter().map(one).collect(),
            Some(v) => Ok(vec![one(v)?]),
        }
    }

    /// Array of integer pairs such as `[[2, 1], [1, 0]]`.
    pub fn pairs_or(&self, key: &str, default: &[(i64, i64)]) -> Result<Vec<(i64, i64)>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v.as_array().map(|p| p.as_slice()) {
                    Some([Value::Integer(x), Value::Integer(y)]) => Ok((*x, *y)),
                    _ => Err(self.err(key, "an array of integer pairs", v)),
                })
                .collect(),
            Some(v) => Err(self.err(key, "an array of integer pairs", v)),
        }
    }

    /// Rejects keys no getter asked for. Call after reading every parameter.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self.table.keys().filter(|k| !used.contains(*k)).map(String::as_str).collect();
        if !unknown.is_empty() {
            bail!("[{}] unknown key(s): {}", self.name, unknown.join(", "));
        }
        Ok(())
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}
