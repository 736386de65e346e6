//! `key = value` defaults file. Keys are flag names; `-` and `_` are interchangeable.

use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::error::{usage, CliError};

const KNOWN_KEYS: &[&str] = &[
    "gamma",
    "horizon",
    "mesh",
    "seed",
    "kind",
    "graph",
    "path",
    "epsilon",
    "epsilons",
    "out",
    "summary",
    "task",
    "source",
    "boundary_values",
    "function",
    "tolerance",
    "svg",
    "mode",
    "start",
    "target",
    "trials",
    "walk_seed",
    "max_steps",
    "steps",
    "method",
    "log",
    "samples",
    "window",
    "sizes",
    "mesh_factors",
    "pairs",
    "chi",
    "csv",
];

#[derive(Debug, Default)]
pub struct Config {
    table: Table,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: Table = text.parse().map_err(|e| usage(format!("config: {e}")))?;
        let mut table = Table::new();
        for (k, v) in raw {
            let key = k.replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(usage(format!("config: unknown key {k:?}")));
            }
            if v.is_table() {
                return Err(usage(format!("config: {k:?} must be a plain value")));
            }
            table.insert(key, v);
        }
        Ok(Config { table })
    }

    fn value(&self, key: &str) -> Option<&Value> {
        self.table.get(key)
    }

    fn mismatch(key: &str, want: &str) -> CliError {
        usage(format!("config: {key} must be {want}"))
    }

    pub fn f64(&self, flag: Option<f64>, key: &str) -> Result<Option<f64>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.value(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(Value::String(s)) => parse_real(s).map(Some),
            Some(_) => Err(Self::mismatch(key, "a number")),
        }
    }

    pub fn u64(&self, flag: Option<u64>, key: &str) -> Result<Option<u64>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.value(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(_) => Err(Self::mismatch(key, "a non-negative integer")),
        }
    }

    pub fn usize(&self, flag: Option<usize>, key: &str) -> Result<Option<usize>, CliError> {
        Ok(self.u64(flag.map(|v| v as u64), key)?.map(|v| v as usize))
    }

    pub fn string(&self, flag: Option<String>, key: &str) -> Result<Option<String>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.value(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(Self::mismatch(key, "a string")),
        }
    }

    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> Result<Option<PathBuf>, CliError> {
        Ok(self.string(flag.map(|p| p.to_string_lossy().into_owned()), key)?.map(PathBuf::from))
    }

    pub fn usize_list(&self, flag: Option<Vec<usize>>, key: &str) -> Result<Option<Vec<usize>>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.value(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as usize),
                    _ => Err(Self::mismatch(key, "a list of non-negative integers")),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(Self::mismatch(key, "a list")),
        }
    }

    pub fn real_list(&self, flag: Option<Vec<String>>, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        if let Some(items) = flag {
            return items.iter().map(|s| parse_real(s)).collect::<Result<Vec<_>, _>>().map(Some);
        }
        match self.value(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Float(x) => Ok(*x),
                    Value::Integer(i) => Ok(*i as f64),
                    Value::String(s) => parse_real(s),
                    _ => Err(Self::mismatch(key, "a list of numbers")),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(Self::mismatch(key, "a list")),
        }
    }
}

/// A real number, also accepting `2^-k` and `a/b`.
pub fn parse_real(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || usage(format!("not a number: {s:?}"));
    if let Some((base, exp)) = s.split_once('^') {
        let b: f64 = base.trim().parse().map_err(|_| bad())?;
        let e: f64 = exp.trim().parse().map_err(|_| bad())?;
        return Ok(b.powf(e));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|_| bad())?;
        let d: f64 = den.trim().parse().map_err(|_| bad())?;
        return Ok(n / d);
    }
    s.parse().map_err(|_| bad())
}
