//! Parameter resolution: command-line flag, then config file, then default.

use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult, Diagnostics};

pub const SEED_ENV: &str = "CUTDENS_SEED";

pub struct Settings {
    file: Map<String, Value>,
    echo: Map<String, Value>,
    pub diagnostics: Diagnostics,
}

impl Settings {
    pub fn new(file: Map<String, Value>) -> Self {
        Self {
            file,
            echo: Map::new(),
            diagnostics: Diagnostics::default(),
        }
    }

    /// A JSON object whose keys are flag names without the dashes.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::new(Map::new()));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(map)) => Ok(Self::new(map)),
            Ok(_) => Err(CliError::input(format!("config {} must be a JSON object", path.display()))),
            Err(e) => Err(CliError::input(format!("config {}: {e}", path.display()))),
        }
    }

    /// The resolved parameters, in resolution order.
    pub fn echo(&self) -> &Map<String, Value> {
        &self.echo
    }

    /// Whether the config file sets `key`.
    pub fn has(&self, key: &str) -> bool {
        self.file_value(key).is_some()
    }

    fn file_value(&self, key: &str) -> Option<String> {
        match self.file.get(key)? {
            Value::Null => None,
            Value::String(s) => Some(s.clone()),
            Value::Array(items) => Some(
                items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            other => Some(other.to_string()),
        }
    }

    /// Raw text for `key`, or `None` when neither flag, file nor default
    /// supplies it.
    pub fn text(&mut self, key: &str, flag: Option<&str>, default: Option<&str>) -> Option<String> {
        let value = flag
            .map(str::to_string)
            .or_else(|| self.file_value(key))
            .or_else(|| default.map(str::to_string))?;
        self.echo.insert(key.to_string(), Value::String(value.clone()));
        Some(value)
    }

    /// Parse the resolved text. Failures are collected as diagnostics and
    /// `None` is returned.
    pub fn get<T>(&mut self, key: &str, flag: Option<&str>, default: Option<&str>) -> Option<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        let raw = self.text(key, flag, default)?;
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.diagnostics.input(format!("--{key} `{raw}`: {e}"));
                None
            }
        }
    }

    pub fn require<T>(&mut self, key: &str, flag: Option<&str>) -> Option<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_none() && self.file_value(key).is_none() {
            self.diagnostics.input(format!("--{key} is required"));
            return None;
        }
        self.get(key, flag, None)
    }

    pub fn list<T>(&mut self, key: &str, flag: Option<&str>, default: Option<&str>) -> Option<Vec<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        let raw = self.text(key, flag, default)?;
        let mut out = Vec::new();
        for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.parse::<T>() {
                Ok(v) => out.push(v),
                Err(e) => {
                    self.diagnostics.input(format!("--{key}: cannot parse `{part}`: {e}"));
                    return None;
                }
            }
        }
        Some(out)
    }

    /// Boolean switches: set by the flag or by `true` in the file.
    pub fn switch(&mut self, key: &str, flag: bool) -> bool {
        let on = flag || matches!(self.file.get(key), Some(Value::Bool(true)));
        self.echo.insert(key.to_string(), Value::Bool(on));
        on
    }

    /// Flag, then config file, then the environment, then 0.
    pub fn seed(&mut self, flag: Option<u64>) -> u64 {
        let flag = flag.map(|s| s.to_string());
        let fallback = std::env::var(SEED_ENV).unwrap_or_else(|_| "0".to_string());
        self.get::<u64>("seed", flag.as_deref(), Some(&fallback)).unwrap_or(0)
    }
}
