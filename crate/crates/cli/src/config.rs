//! Run configuration: a JSON file with flag overrides layered on top.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use complexity_lab::experiments::SCHEMA_VERSION;

pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub command: String,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "empty_object")]
    pub params: Value,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn empty_object() -> Value {
    Value::Object(Map::new())
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            master_seed: 0,
            output_dir: None,
            workers: 0,
            params: empty_object(),
        }
    }

    /// Reads a JSON config; decode errors carry the line and column.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("malformed config {}", path.display()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            bail!(
                "config {} has schema_version {}, expected {SCHEMA_VERSION}",
                path.display(),
                cfg.schema_version
            );
        }
        Ok(cfg)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }
}

/// Recursively overlays `top` onto `base`; `null` leaves in `top` are ignored.
pub fn overlay(base: &mut Value, top: Value) {
    match (base, top) {
        (_, Value::Null) => {}
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                overlay(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, t) => *b = t,
    }
}

/// Layers defaults, file parameters and flag values, then decodes the result.
/// Unknown keys in the file are rejected by the decoder.
pub fn resolve<A, P>(file: &Value, flags: &A) -> Result<P>
where
    A: Serialize,
    P: Serialize + DeserializeOwned + Default,
{
    let mut merged = serde_json::to_value(P::default())?;
    match file {
        Value::Null => {}
        Value::Object(_) => overlay(&mut merged, file.clone()),
        _ => bail!("`params` must be a JSON object"),
    }
    overlay(&mut merged, serde_json::to_value(flags)?);
    serde_json::from_value(merged).context("invalid parameters")
}

/// Parses an enum through its serde names, for flag values.
pub fn parse_serde<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|e| e.to_string())
}

/// Counts may be written as `100000` or `1e5`.
pub fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= 1e15 {
        Ok(x as usize)
    } else {
        Err(format!("`{s}` is not a nonnegative integer"))
    }
}
