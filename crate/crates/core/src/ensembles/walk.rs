//! Random walks `U_t = V^{(t)} ⋯ V^{(1)}` and their traces.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::arch::{slh_step, CircuitArchitecture, StepLabel};
use crate::error::{Error, Result};
use crate::qmath::{distance_to_identity, Unitary};

/// Largest dimension for which full channels are recorded.
pub const FULL_RECORD_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordMode {
    Full,
    Summary,
}

#[derive(Debug, Clone)]
pub struct WalkTrace {
    pub seed: Option<u64>,
    pub arch_id: String,
    pub times: Vec<f64>,
    pub unitaries: Option<Vec<Unitary>>,
    pub labels: Vec<StepLabel>,
    pub dist_to_id: Vec<f64>,
    /// One column per requested ε, filled by the complexity module.
    pub complexity: Option<Vec<Vec<Option<u32>>>>,
    pub eps: Vec<f64>,
    pub final_state: Unitary,
}

impl WalkTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Runs `t_max` steps (SLH: `t_max` increments of `dt`) from the identity.
pub fn walk<R: Rng + ?Sized>(
    arch: &CircuitArchitecture,
    t_max: usize,
    record: RecordMode,
    eps_list: &[f64],
    rng: &mut R,
) -> Result<WalkTrace> {
    walk_from(arch, Unitary::identity(arch.dim()), t_max, record, eps_list, rng)
}

pub fn walk_from<R: Rng + ?Sized>(
    arch: &CircuitArchitecture,
    start: Unitary,
    t_max: usize,
    record: RecordMode,
    eps_list: &[f64],
    rng: &mut R,
) -> Result<WalkTrace> {
    let d = arch.dim();
    if record == RecordMode::Full && d > FULL_RECORD_CAP {
        return Err(Error::Capacity {
            what: "full walk record dimension".into(),
            required: d,
            cap: FULL_RECORD_CAP,
        });
    }
    let dt = arch.slh.map(|p| p.dt).unwrap_or(1.0);
    let mut u = start;
    let mut times = Vec::with_capacity(t_max + 1);
    let mut dist = Vec::with_capacity(t_max + 1);
    let mut labels = Vec::new();
    let mut full = (record == RecordMode::Full).then(Vec::new);
    times.push(0.0);
    dist.push(distance_to_identity(&u));
    if let Some(f) = full.as_mut() {
        f.push(u.clone());
    }
    for j in 1..=t_max {
        u = if arch.is_continuous() {
            slh_step(arch, &u, rng)?
        } else {
            let (v, label) = arch.sample_step_labeled(rng)?;
            labels.push(label);
            v.compose(&u)
        };
        times.push(j as f64 * dt);
        dist.push(distance_to_identity(&u));
        if let Some(f) = full.as_mut() {
            f.push(u.clone());
        }
    }
    Ok(WalkTrace {
        seed: None,
        arch_id: arch.id(),
        times,
        unitaries: full,
        labels,
        dist_to_id: dist,
        complexity: None,
        eps: eps_list.to_vec(),
        final_state: u,
    })
}

/// Endpoint of a walk without recording anything.
pub fn walk_endpoint<R: Rng + ?Sized>(arch: &CircuitArchitecture, t: usize, rng: &mut R) -> Result<Unitary> {
    let mut u = Unitary::identity(arch.dim());
    for _ in 0..t {
        u = if arch.is_continuous() {
            slh_step(arch, &u, rng)?
        } else {
            arch.sample_step_labeled(rng)?.0.compose(&u)
        };
    }
    Ok(u)
}
