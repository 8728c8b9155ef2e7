//! key = value config files. Blank lines and `#` comments are skipped.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use krylov_circuits::state::Boundary;

#[derive(Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("config file {}: {e}", path.display()))?;
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(format!("config line {}: empty key", lineno + 1));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get_string(&self, key: &str) -> Option<String> {
        self.values.get(key).cloned()
    }

    pub fn get_path(&self, key: &str) -> Option<PathBuf> {
        self.values.get(key).map(PathBuf::from)
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, String> {
        self.parse_with(key, str::parse::<u64>)
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, String> {
        self.parse_with(key, str::parse::<usize>)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, String> {
        self.parse_with(key, str::parse::<f64>)
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>, String> {
        self.parse_with(key, str::parse::<bool>)
    }

    pub fn get_boundary(&self, key: &str) -> Result<Option<Boundary>, String> {
        match self.values.get(key).map(String::as_str) {
            None => Ok(None),
            Some("open") => Ok(Some(Boundary::Open)),
            Some("periodic") => Ok(Some(Boundary::Periodic)),
            Some(other) => Err(format!("config key {key}: unknown boundary {other:?}")),
        }
    }

    fn parse_with<T, E: std::fmt::Display>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, E>,
    ) -> Result<Option<T>, String> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => parse(v)
                .map(Some)
                .map_err(|e| format!("config key {key}: {e}")),
        }
    }
}
