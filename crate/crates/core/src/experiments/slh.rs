//! Empirical checks of the SLH process: maximal inequality and drift.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Verdict, SCHEMA_VERSION};
use crate::ensembles::{slh_step, CircuitArchitecture};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::moments::maximal_inequality_bound;
use crate::qmath::{distance_to_identity, Unitary};
use crate::rng::{fork_seed, par_indexed};
use crate::stats::{linear_fit, Estimate, CONFIDENCE};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlhStabilityRow {
    pub x: f64,
    pub exceed: Estimate,
    pub bound: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlhStabilityReport {
    pub schema_version: u32,
    pub arch_id: String,
    pub d: usize,
    pub m: usize,
    pub s: f64,
    pub dt: f64,
    pub steps: usize,
    pub n_realizations: usize,
    pub rows: Vec<SlhStabilityRow>,
    /// Exceedance frequencies are nonincreasing in `x`.
    pub monotone: bool,
    pub verdict: Verdict,
}

fn slh_params(arch: &CircuitArchitecture, s: f64) -> Result<(f64, usize)> {
    let p = arch
        .slh
        .ok_or_else(|| Error::Architecture("SLH experiment needs an SLH architecture".into()))?;
    if s.is_nan() || s <= 0.0 {
        return Err(Error::Domain(format!("horizon s = {s} must be positive")));
    }
    Ok((p.dt, (s / p.dt).round().max(1.0) as usize))
}

/// Frequency of `max_{t ≤ s} [D(U_t, I) − m t/2] > x` against
/// `2d · exp(−x²/(2ms))`. A grid point fails when the frequency exceeds the
/// bound by more than three interval half-widths.
pub fn slh_stability_test<R: Rng + ?Sized>(
    arch: &CircuitArchitecture,
    s: f64,
    x_grid: &[f64],
    n_realizations: usize,
    rng: &mut R,
) -> Result<SlhStabilityReport> {
    let (dt, steps) = slh_params(arch, s)?;
    let m = arch.edges();
    let d = arch.dim();
    let base = fork_seed(rng);
    let maxima: Vec<f64> = par_indexed(n_realizations, base, "slh.stability", |_, r| {
        let mut u = Unitary::identity(d);
        let mut best = 0.0f64;
        for j in 1..=steps {
            u = slh_step(arch, &u, r).expect("architecture validated");
            let t = j as f64 * dt;
            best = best.max(distance_to_identity(&u) - m as f64 * t / 2.0);
        }
        best
    });
    let rows: Vec<SlhStabilityRow> = x_grid
        .iter()
        .map(|&x| {
            let hits = maxima.iter().filter(|&&v| v > x).count() as u64;
            let exceed = Estimate::new(hits, n_realizations as u64, CONFIDENCE);
            let bound = maximal_inequality_bound(d as f64, m as f64, steps as f64 * dt, x);
            SlhStabilityRow {
                x,
                violated: exceed.value > bound + 3.0 * exceed.half_width(),
                exceed,
                bound,
            }
        })
        .collect();
    let mut order: Vec<&SlhStabilityRow> = rows.iter().collect();
    order.sort_by(|a, b| a.x.total_cmp(&b.x));
    let monotone = order.windows(2).all(|w| w[1].exceed.hits <= w[0].exceed.hits);
    let verdict = if rows.iter().any(|r| r.violated) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok(SlhStabilityReport {
        schema_version: SCHEMA_VERSION,
        arch_id: arch.id(),
        d,
        m,
        s: steps as f64 * dt,
        dt,
        steps,
        n_realizations,
        rows,
        monotone,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriftFit {
    pub m: usize,
    /// Fitted slope of `ln Re E[tr U_t / d]` against `t`.
    pub slope: f64,
    pub slope_stderr: f64,
    pub expected: f64,
    pub times: Vec<f64>,
    pub mean_trace: Vec<f64>,
}

/// Fits the exponential decay of `E[U_t]`.
pub fn slh_drift<R: Rng + ?Sized>(
    arch: &CircuitArchitecture,
    s: f64,
    n_realizations: usize,
    rng: &mut R,
) -> Result<DriftFit> {
    let (dt, steps) = slh_params(arch, s)?;
    let d = arch.dim();
    let base = fork_seed(rng);
    let traces: Vec<Vec<C64>> = par_indexed(n_realizations, base, "slh.drift", |_, r| {
        let mut u = Unitary::identity(d);
        (1..=steps)
            .map(|_| {
                u = slh_step(arch, &u, r).expect("architecture validated");
                u.matrix().trace() / d as f64
            })
            .collect()
    });
    let times: Vec<f64> = (1..=steps).map(|j| j as f64 * dt).collect();
    let mean_trace: Vec<f64> = (0..steps)
        .map(|j| traces.iter().map(|tr| tr[j].re).sum::<f64>() / n_realizations as f64)
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&mean_trace)
        .filter(|(_, &m)| m > 0.0)
        .map(|(&t, &m)| (t, m.ln()))
        .unzip();
    let fit = linear_fit(&x, &y, &vec![1.0; x.len()])?;
    let m = arch.edges();
    Ok(DriftFit {
        m,
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        expected: -(m as f64) / 2.0 * arch.slh.expect("checked").normalization.trace_constant(arch.q)
            * (arch.q * arch.q) as f64,
        times,
        mean_trace,
    })
}
