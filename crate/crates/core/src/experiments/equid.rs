//! Statistical certification of (α, β)-equidistribution at scale ε.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{state_volume, HaarDistanceSample, RefVolume, Verdict, SCHEMA_VERSION};
use crate::ensembles::{walk_endpoint, CircuitArchitecture};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::qmath::{distance_matrices, haar_matrix, haar_state};
use crate::rng::{fork_seed, par_collect};
use crate::stats::{Estimate, CONFIDENCE};

/// Smallest reference sample for unitary-space volumes.
pub const MIN_REFERENCE_SAMPLES: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquidSpace {
    /// Walk channels `U_t` against Haar channels.
    Unitary,
    /// Walk states `U_t|0⟩` against uniform states.
    State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    /// Interval lies inside the reference window.
    Inside,
    /// Interval misses the reference window entirely.
    Disjoint,
    Overlap,
    ZeroHits,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquidCell {
    pub center: usize,
    pub radius: f64,
    pub estimate: Estimate,
    pub ref_alpha: RefVolume,
    pub ref_beta: RefVolume,
    pub status: CellStatus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquidCertificate {
    pub schema_version: u32,
    pub arch_id: String,
    pub space: EquidSpace,
    pub t: usize,
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n_centers: usize,
    pub n_samples: usize,
    pub radii: Vec<f64>,
    /// `exact` for state balls, `reference=MC` for unitary balls.
    pub reference: String,
    pub reference_samples: usize,
    pub cells: Vec<EquidCell>,
    pub verdict: Verdict,
    pub message: String,
}

fn classify(est: &Estimate, a: &RefVolume, b: &RefVolume) -> CellStatus {
    if est.hi < a.lo || est.lo > b.hi {
        CellStatus::Disjoint
    } else if est.lo >= a.hi && est.hi <= b.lo {
        CellStatus::Inside
    } else if est.hits == 0 {
        CellStatus::ZeroHits
    } else {
        CellStatus::Overlap
    }
}

/// Estimates `ν_t(B(c, R))` for Haar-random centers `c` and `R ∈ {ε, 2ε}`
/// from `n_samples` walks of length `t`, and compares each 99% interval with
/// the Haar volumes at `αR` and `βR`.
///
/// The verdict is `pass` when every interval sits inside its window, `fail`
/// when some interval misses its window, `inconclusive` otherwise.
#[allow(clippy::too_many_arguments)]
pub fn certify_equidistribution<R: Rng + ?Sized>(
    arch: &CircuitArchitecture,
    space: EquidSpace,
    t: usize,
    eps: f64,
    alpha: f64,
    beta: f64,
    n_centers: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<EquidCertificate> {
    let d = arch.dim();
    let diameter = match space {
        EquidSpace::Unitary => 2.0,
        EquidSpace::State => 1.0,
    };
    if !(eps > 0.0 && eps <= diameter) {
        return Err(Error::Domain(format!("eps = {eps} outside (0, {diameter}]")));
    }
    if !(alpha > 0.0 && alpha <= beta) {
        return Err(Error::Domain(format!("need 0 < alpha ≤ beta, got ({alpha}, {beta})")));
    }
    if n_centers == 0 || n_samples == 0 {
        return Err(Error::InvalidInput("n_centers and n_samples must be positive".into()));
    }
    let mut radii = vec![eps];
    if 2.0 * eps <= diameter {
        radii.push(2.0 * eps);
    }

    let base = fork_seed(rng);
    let endpoints: Vec<CMat> = par_collect(n_samples, base, "equid.walk", |r| {
        walk_endpoint(arch, t, r).expect("architecture validated").into_matrix()
    });

    let (reference, reference_samples, cells) = match space {
        EquidSpace::State => {
            let centers: Vec<_> = (0..n_centers).map(|_| haar_state(d, rng)).collect::<Result<_>>()?;
            let outputs: Vec<_> = endpoints.iter().map(|u| u.column(0).into_owned()).collect();
            let mut cells = Vec::new();
            for (ci, c) in centers.iter().enumerate() {
                let dists: Vec<f64> = outputs
                    .iter()
                    .map(|v| (1.0 - c.amplitudes().dotc(v).norm_sqr()).max(0.0).sqrt())
                    .collect();
                for &radius in &radii {
                    let hits = dists.iter().filter(|&&x| x <= radius).count() as u64;
                    let est = Estimate::new(hits, n_samples as u64, CONFIDENCE);
                    let a = state_volume(d, alpha * radius)?;
                    let b = state_volume(d, beta * radius)?;
                    cells.push(EquidCell {
                        center: ci,
                        radius,
                        status: classify(&est, &a, &b),
                        estimate: est,
                        ref_alpha: a,
                        ref_beta: b,
                    });
                }
            }
            ("exact".to_string(), 0, cells)
        }
        EquidSpace::Unitary => {
            let centers: Vec<CMat> = (0..n_centers).map(|_| haar_matrix(d, rng)).collect();
            let reference = HaarDistanceSample::draw(d, n_samples.max(MIN_REFERENCE_SAMPLES), rng)?;
            let mut cells = Vec::new();
            for (ci, c) in centers.iter().enumerate() {
                let dists: Vec<f64> = endpoints.iter().map(|u| distance_matrices(u, c)).collect();
                for &radius in &radii {
                    let hits = dists.iter().filter(|&&x| x <= radius).count() as u64;
                    let est = Estimate::new(hits, n_samples as u64, CONFIDENCE);
                    let a = reference.volume(alpha * radius);
                    let b = reference.volume(beta * radius);
                    cells.push(EquidCell {
                        center: ci,
                        radius,
                        status: classify(&est, &a, &b),
                        estimate: est,
                        ref_alpha: a,
                        ref_beta: b,
                    });
                }
            }
            ("reference=MC".to_string(), reference.len(), cells)
        }
    };

    let any = |s: CellStatus| cells.iter().any(|c| c.status == s);
    let (verdict, message) = if any(CellStatus::Disjoint) {
        (Verdict::Fail, "some ball measure falls outside its reference window".to_string())
    } else if cells.iter().all(|c| c.status == CellStatus::Inside) {
        (Verdict::Pass, "every ball measure lies inside its reference window".to_string())
    } else if any(CellStatus::ZeroHits) {
        (
            Verdict::Inconclusive,
            "some balls received no samples; raise n_samples".to_string(),
        )
    } else {
        (
            Verdict::Inconclusive,
            "some intervals straddle a window edge; raise n_samples or widen (alpha, beta)".to_string(),
        )
    };

    Ok(EquidCertificate {
        schema_version: SCHEMA_VERSION,
        arch_id: arch.id(),
        space,
        t,
        eps,
        alpha,
        beta,
        n_centers,
        n_samples,
        radii,
        reference,
        reference_samples,
        cells,
        verdict,
        message,
    })
}
