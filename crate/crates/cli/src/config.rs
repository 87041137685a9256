use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: Option<u64>,
    pub params: Value,
    pub output_dir: PathBuf,
}

const TOP_KEYS: &[&str] = &["name", "seed", "params", "output_dir"];

/// Parameter block of one experiment. Every key is required; there are no defaults.
pub trait Params: DeserializeOwned {
    const KEYS: &'static [&'static str];
}

fn check_keys(obj: &Map<String, Value>, prefix: &str, allowed: &[&str], required: &[&str]) -> Result<()> {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::config(join(k), "unknown key"));
    }
    if let Some(k) = required.iter().find(|k| !obj.contains_key(**k)) {
        return Err(CliError::config(join(k), "missing key"));
    }
    Ok(())
}

/// Decodes an object whose keys must be exactly `P::KEYS`; errors carry `path`.
pub fn decode<P: Params>(v: &Value, path: &str) -> Result<P> {
    let obj = v.as_object().ok_or_else(|| CliError::config(path, "expected an object"))?;
    check_keys(obj, path, P::KEYS, P::KEYS)?;
    serde_json::from_value(v.clone()).map_err(|e| CliError::config(path, e.to_string()))
}

impl ExperimentConfig {
    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| CliError::config("", "config must be a JSON object"))?;
        check_keys(obj, "", TOP_KEYS, &["name", "params", "output_dir"])?;
        let name = obj["name"].as_str().ok_or_else(|| CliError::config("name", "expected a string"))?.to_string();
        let seed = match obj.get("seed") {
            None | Some(Value::Null) => None,
            Some(s) => Some(s.as_u64().ok_or_else(|| CliError::config("seed", "expected a nonnegative 64-bit integer"))?),
        };
        let params = obj["params"].clone();
        if !params.is_object() {
            return Err(CliError::config("params", "expected an object"));
        }
        let output_dir = PathBuf::from(
            obj["output_dir"].as_str().ok_or_else(|| CliError::config("output_dir", "expected a string"))?,
        );
        Ok(Self { name, seed, params, output_dir })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| CliError::config("", e.to_string()))?;
        Self::from_value(&v)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Strict decoding of `params`: unknown and missing keys are reported by path.
    pub fn params<P: Params>(&self) -> Result<P> {
        decode(&self.params, "params")
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| CliError::config("seed", format!("experiment `{}` is randomized and needs a seed", self.name)))
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        if let Some(s) = self.seed {
            m.insert("seed".into(), Value::from(s));
        }
        m.insert("params".into(), self.params.clone());
        m.insert("output_dir".into(), Value::String(self.output_dir.display().to_string()));
        Value::Object(m)
    }
}
