//! Desk-scale experiments built from the samplers, the complexity search and
//! the bound calculators. Every report is a deterministic function of its
//! parameters and the stream it was handed.

pub mod equid;
pub mod recurrence;
pub mod slh;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::vol_state_ball;
use crate::qmath::{distance_to_identity, haar_unitary};
use crate::rng::{fork_seed, par_collect};
use crate::stats::{clopper_pearson, CONFIDENCE};

pub use equid::{certify_equidistribution, CellStatus, EquidCell, EquidCertificate, EquidSpace};
pub use recurrence::{
    conditional_recurrence_profile, run_recurrence, saturation_window_scan, ConditionalProfile,
    ConditionalRow, RecurrenceConfig, RecurrenceReport, RecurrenceSample, SaturationRow, SaturationScan,
};
pub use slh::{slh_drift, slh_stability_test, DriftFit, SlhStabilityReport, SlhStabilityRow};

/// Version stamped into every JSON summary and run manifest.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Process exit code: 0 pass, 2 fail, 3 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 2,
            Verdict::Inconclusive => 3,
        }
    }
}

/// Reference Haar measure of a ball. Exact laws carry `lo == hi == value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefVolume {
    pub radius: f64,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl RefVolume {
    pub fn exact(radius: f64, value: f64) -> Self {
        RefVolume {
            radius,
            value,
            lo: value,
            hi: value,
        }
    }
}

/// Machine-file number format: 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Sorted Haar distances to the identity; ball volumes at any radius are read
/// off by counting.
#[derive(Debug, Clone)]
pub struct HaarDistanceSample {
    pub d: usize,
    sorted: Vec<f64>,
}

impl HaarDistanceSample {
    pub fn draw<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("reference sample size must be positive".into()));
        }
        if d == 0 {
            return Err(Error::InvalidDimension("d must be positive".into()));
        }
        let base = fork_seed(rng);
        let mut sorted = par_collect(n, base, "ref.unitary", |r| {
            distance_to_identity(&haar_unitary(d, r).expect("d checked"))
        });
        sorted.sort_by(f64::total_cmp);
        Ok(HaarDistanceSample { d, sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn volume(&self, radius: f64) -> RefVolume {
        if radius >= 2.0 {
            return RefVolume::exact(radius, 1.0);
        }
        let hits = self.sorted.partition_point(|&x| x <= radius) as u64;
        let n = self.sorted.len() as u64;
        let (lo, hi) = clopper_pearson(hits, n, CONFIDENCE);
        RefVolume {
            radius,
            value: hits as f64 / n as f64,
            lo,
            hi,
        }
    }
}

pub(crate) fn state_volume(d: usize, radius: f64) -> Result<RefVolume> {
    Ok(RefVolume::exact(radius, vol_state_ball(d, radius.min(1.0))?))
}
