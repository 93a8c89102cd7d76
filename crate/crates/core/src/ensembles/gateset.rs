//! Discrete gate sets, stored as JSON data.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::qmath::{unitarity_defect, Unitary, UNITARY_TOL};

const BUILTIN: &[(&str, &str)] = &[
    ("ht", include_str!("../../gatesets/ht.json")),
    ("ht_cnot", include_str!("../../gatesets/ht_cnot.json")),
];

#[derive(Debug, Clone)]
pub struct GateSet {
    pub name: String,
    pub locality: usize,
    pub q: usize,
    pub gates: Vec<Unitary>,
    pub labels: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateSetFile {
    name: String,
    locality: usize,
    #[serde(default)]
    q: Option<usize>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    gates: Vec<Vec<Vec<[f64; 2]>>>,
}

impl GateSet {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: GateSetFile = serde_json::from_str(text)?;
        let bad = |why: String| Error::GateSet(format!("`{}`: {why}", f.name));
        if !(1..=2).contains(&f.locality) {
            return Err(bad(format!("locality {} not in {{1, 2}}", f.locality)));
        }
        if f.gates.len() < 2 {
            return Err(bad("a gate set needs at least two gates".into()));
        }
        let dim = f.gates[0].len();
        let q = match f.q {
            Some(q) => q,
            None => (1..=dim).find(|q| q.pow(f.locality as u32) == dim).unwrap_or(0),
        };
        if q < 2 || q.pow(f.locality as u32) != dim {
            return Err(bad(format!("gate dimension {dim} is not q^{}", f.locality)));
        }
        let mut gates = Vec::with_capacity(f.gates.len());
        for (g, rows) in f.gates.iter().enumerate() {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(bad(format!("gate {g} is not {dim}×{dim}")));
            }
            let m = CMat::from_fn(dim, dim, |r, c| C64::new(rows[r][c][0], rows[r][c][1]));
            let defect = unitarity_defect(&m);
            if defect > UNITARY_TOL {
                return Err(bad(format!("gate {g} is not unitary (deviation {defect:e})")));
            }
            gates.push(Unitary::new(m)?);
        }
        let labels = match f.labels {
            Some(l) if l.len() == gates.len() => l,
            Some(_) => return Err(bad("labels and gates differ in length".into())),
            None => (0..gates.len()).map(|i| format!("g{i}")).collect(),
        };
        Ok(GateSet {
            name: f.name,
            locality: f.locality,
            q,
            gates,
            labels,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// `ht` (1-qubit H, T) or `ht_cnot` (H and T on either qubit plus CNOT).
    pub fn builtin(name: &str) -> Result<Self> {
        let (_, text) = BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::GateSet(format!("no built-in gate set named `{name}`")))?;
        Self::from_json(text)
    }

    /// A built-in name or a path to a JSON file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if BUILTIN.iter().any(|(n, _)| *n == name_or_path) {
            Self::builtin(name_or_path)
        } else {
            Self::load(Path::new(name_or_path))
        }
    }

    pub fn builtin_names() -> Vec<&'static str> {
        BUILTIN.iter().map(|(n, _)| *n).collect()
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn gate_dim(&self) -> usize {
        self.q.pow(self.locality as u32)
    }
}
