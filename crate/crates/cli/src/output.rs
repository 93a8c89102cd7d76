//! Output directory, manifest and CSV/JSON writers.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use complexity_lab::experiments::SCHEMA_VERSION;
use complexity_lab::rng::{substream, Stream};
use serde::Serialize;

use crate::config::RunConfig;

pub struct Ctx {
    pub dir: PathBuf,
    pub seed: u64,
    pub quiet: bool,
}

impl Ctx {
    pub fn new(cfg: &RunConfig, quiet: bool) -> Result<Self> {
        let dir = cfg.output_dir();
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Ctx {
            dir,
            seed: cfg.master_seed,
            quiet,
        })
    }

    pub fn rng(&self, component: &str) -> Stream {
        substream(self.seed, component, 0)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&self, name: &str) -> Result<csv::Writer<File>> {
        let path = self.path(name);
        csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))
    }

    /// Writes a JSON summary. Objects get a `schema_version` field unless they
    /// already carry one.
    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut v = serde_json::to_value(value)?;
        if let serde_json::Value::Object(m) = &mut v {
            m.entry("schema_version").or_insert(SCHEMA_VERSION.into());
        }
        write_json(&self.path(name), &v)
    }

    pub fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Full-precision rendering for machine-readable files.
pub fn num(x: f64) -> String {
    complexity_lab::experiments::fmt_num(x)
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn opt_int<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
