//! Ball volumes, overlap and arc laws, packing/covering, and the pure-state
//! polynomial delta kernel.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::factorial::binomial;

use crate::error::{Error, Result};
use crate::qmath::{
    distance_state, distance_to_identity, distance_unitary, haar_state, haar_unitary, PureState,
    UnitaryChannel,
};
use crate::rng::{fork_seed, par_collect, par_count};
use crate::stats::{Estimate, CONFIDENCE};

/// Lower Szarek constant `c_o`.
pub const SZAREK_LOWER: f64 = 1.0 / (9.0 * PI);
/// Upper Szarek constant `c^o`.
pub const SZAREK_UPPER: f64 = 87.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeBounds {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "d", rename_all = "lowercase")]
pub enum Space {
    Unitary(usize),
    State(usize),
}

impl Space {
    pub fn dim(&self) -> usize {
        match *self {
            Space::Unitary(d) | Space::State(d) => d,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Space::Unitary(_) => 2.0,
            Space::State(_) => 1.0,
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidDimension("d must be positive".into()))
    } else {
        Ok(())
    }
}

/// Haar measure of a state ball, `ε^{2(d−1)}`.
pub fn vol_state_ball(d: usize, eps: f64) -> Result<f64> {
    check_dim(d)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("state ball radius {eps} outside (0, 1]")));
    }
    Ok(eps.powi(2 * (d as i32 - 1)))
}

/// `((c_o ε)^{d²−1}, (c^o ε)^{d²−1})`, optionally clamped to `[0, 1]`.
pub fn szarek_bounds(d: usize, eps: f64, clamp: bool) -> Result<VolumeBounds> {
    check_dim(d)?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Domain(format!("radius {eps} must be positive")));
    }
    let p = (d * d - 1) as i32;
    let mut lower = (SZAREK_LOWER * eps).powi(p);
    let mut upper = (SZAREK_UPPER * eps).powi(p);
    if clamp {
        lower = lower.min(1.0);
        upper = upper.min(1.0);
    }
    Ok(VolumeBounds {
        lower,
        upper,
        exact: None,
    })
}

/// Haar measure of `{U : D(U, I) ≤ dist}` on U(2), from the Weyl density of
/// the eigenphase difference.
pub fn haar_distance_cdf_qubit(dist: f64) -> f64 {
    if dist <= 0.0 {
        return 0.0;
    }
    if dist >= 2.0 {
        return 1.0;
    }
    let a = 4.0 * (dist / 2.0).asin();
    ((a - a.sin()) / PI).clamp(0.0, 1.0)
}

/// Monte Carlo Haar measure of a ball of radius `eps` with a 99% interval.
pub fn mc_ball_volume<R: Rng + ?Sized>(
    space: Space,
    eps: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    check_dim(space.dim())?;
    if !(eps > 0.0 && eps <= space.diameter()) {
        return Err(Error::Domain(format!(
            "radius {eps} outside (0, {}]",
            space.diameter()
        )));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be positive".into()));
    }
    let base = fork_seed(rng);
    let hits = match space {
        Space::Unitary(d) => par_count(n_samples, base, "ball.unitary", |r| {
            distance_to_identity(&haar_unitary(d, r).unwrap()) <= eps
        }),
        Space::State(d) => {
            let thresh = 1.0 - eps * eps;
            par_count(n_samples, base, "ball.state", |r| {
                haar_state(d, r).unwrap().amplitudes()[0].norm_sqr() >= thresh
            })
        }
    };
    Ok(Estimate::new(hits, n_samples as u64, CONFIDENCE))
}

/// Density of `|⟨ψ₀|ψ⟩|²` for Haar `ψ`.
pub fn overlap_pdf(d: usize, x: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension("overlap law needs d ≥ 2".into()));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("overlap {x} outside [0, 1]")));
    }
    Ok((d as f64 - 1.0) * (1.0 - x).powi(d as i32 - 2))
}

pub fn overlap_cdf(d: usize, x: f64) -> Result<f64> {
    overlap_pdf(d, x.clamp(0.0, 1.0))?;
    Ok(1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(d as i32 - 1))
}

/// Probability that the shortest arc of `d` i.i.d. uniform phases is `≤ r`.
pub fn arc_cdf(d: usize, r: f64) -> Result<f64> {
    check_dim(d)?;
    if !(0.0..=PI).contains(&r) {
        return Err(Error::Domain(format!("arc law holds for r ∈ [0, π], got {r}")));
    }
    if d == 1 {
        return Ok(1.0);
    }
    Ok(d as f64 * (r / TAU).powi(d as i32 - 1))
}

/// Upper bound on the Haar measure of the annulus `A(κ, λκ)`.
pub fn annulus_bound(d: usize, kappa: f64, lam: f64) -> Result<f64> {
    check_dim(d)?;
    if lam < 1.0 || kappa <= 0.0 {
        return Err(Error::Domain("annulus needs κ > 0 and λ ≥ 1".into()));
    }
    if lam * kappa > 2f64.sqrt() {
        return Err(Error::Domain(format!(
            "annulus bound requires λκ ≤ √2, got {}",
            lam * kappa
        )));
    }
    Ok((2.0 * lam * kappa).powi((d * d - 1) as i32) * (lam - 1.0))
}

/// Points with a metric; implemented by channels and states.
pub trait MetricPoint: Clone {
    fn dist(&self, other: &Self) -> f64;
}

impl MetricPoint for UnitaryChannel {
    fn dist(&self, other: &Self) -> f64 {
        distance_unitary(self, other).expect("points of one space share a dimension")
    }
}

impl MetricPoint for PureState {
    fn dist(&self, other: &Self) -> f64 {
        distance_state(self, other).expect("points of one space share a dimension")
    }
}

#[derive(Debug, Clone)]
pub struct PackingResult<P> {
    pub centers: Vec<P>,
    pub radius: f64,
    pub count: usize,
}

impl<P: MetricPoint> PackingResult<P> {
    /// Exhaustive check of pairwise separation.
    pub fn verify(&self) -> bool {
        for i in 0..self.centers.len() {
            for j in 0..i {
                if self.centers[i].dist(&self.centers[j]) < self.radius {
                    return false;
                }
            }
        }
        self.count == self.centers.len()
    }
}

/// Keeps every candidate at distance `≥ radius` from all previously kept
/// ones, in sampler order.
pub fn greedy_packing<P, R, S>(mut sampler: S, radius: f64, budget: usize, rng: &mut R) -> PackingResult<P>
where
    P: MetricPoint,
    R: Rng + ?Sized,
    S: FnMut(&mut R) -> P,
{
    greedy_packing_from((0..budget).map(|_| sampler(rng)), radius)
}

pub fn greedy_packing_from<P: MetricPoint>(points: impl IntoIterator<Item = P>, radius: f64) -> PackingResult<P> {
    let mut centers: Vec<P> = Vec::new();
    for p in points {
        if centers.iter().all(|c| c.dist(&p) >= radius) {
            centers.push(p);
        }
    }
    let count = centers.len();
    PackingResult {
        centers,
        radius,
        count,
    }
}

fn adjacency<P: MetricPoint>(points: &[P], close: impl Fn(f64) -> bool) -> Vec<u64> {
    let n = points.len();
    let mut adj = vec![0u64; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || close(points[i].dist(&points[j])) {
                adj[i] |= 1 << j;
            }
        }
    }
    adj
}

const EXACT_MAX_POINTS: usize = 24;

fn exact_guard(n: usize) -> Result<()> {
    if n > EXACT_MAX_POINTS {
        Err(Error::Capacity {
            what: "exhaustive packing/covering".into(),
            required: n,
            cap: EXACT_MAX_POINTS,
        })
    } else {
        Ok(())
    }
}

/// Largest subset with pairwise distances `> 2ε` (disjoint ε-balls), by
/// exhaustive branch and bound.
pub fn packing_number_exact<P: MetricPoint>(points: &[P], eps: f64) -> Result<usize> {
    exact_guard(points.len())?;
    let conflict = adjacency(points, |d| d <= 2.0 * eps);
    fn best(cand: u64, conflict: &[u64], size: usize, acc: &mut usize) {
        if cand == 0 {
            *acc = (*acc).max(size);
            return;
        }
        if size + cand.count_ones() as usize <= *acc {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        best(cand & !conflict[v], conflict, size + 1, acc);
        best(cand & !(1 << v), conflict, size, acc);
    }
    let mut acc = 0;
    let all = if points.len() == 64 { u64::MAX } else { (1u64 << points.len()) - 1 };
    best(all, &conflict, 0, &mut acc);
    Ok(acc)
}

/// Fewest points of the set whose closed ε-balls cover it.
pub fn covering_number_exact<P: MetricPoint>(points: &[P], eps: f64) -> Result<usize> {
    exact_guard(points.len())?;
    let n = points.len();
    if n == 0 {
        return Ok(0);
    }
    let ball = adjacency(points, |d| d <= eps);
    let all = (1u64 << n) - 1;
    fn search(covered: u64, all: u64, start: usize, left: usize, ball: &[u64]) -> bool {
        if covered == all {
            return true;
        }
        if left == 0 {
            return false;
        }
        // Some chosen center must cover the first uncovered point.
        let first = (!covered & all).trailing_zeros() as usize;
        let _ = start;
        (0..ball.len())
            .filter(|&c| ball[c] >> first & 1 == 1)
            .any(|c| search(covered | ball[c], all, 0, left - 1, ball))
    }
    Ok((1..=n).find(|&m| search(0, all, 0, m, &ball)).unwrap_or(n))
}

/// Greedy internal ε-cover: repeatedly picks the point covering the most
/// uncovered points. Its size upper-bounds the covering number.
pub fn greedy_cover<P: MetricPoint>(points: &[P], eps: f64) -> Vec<usize> {
    let n = points.len();
    let balls: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| points[i].dist(&points[j]) <= eps).collect())
        .collect();
    let mut covered = vec![false; n];
    let mut chosen = Vec::new();
    while covered.iter().any(|c| !c) {
        let (best, _) = balls
            .iter()
            .enumerate()
            .map(|(i, b)| (i, b.iter().filter(|&&j| !covered[j]).count()))
            .max_by_key(|&(i, c)| (c, std::cmp::Reverse(i)))
            .unwrap();
        for &j in &balls[best] {
            covered[j] = true;
        }
        chosen.push(best);
    }
    chosen
}

/// Polynomial delta kernel `F_k(ψ) = |⟨φ|ψ⟩|^{2k} / I_k` centered at `φ`.
#[derive(Debug, Clone)]
pub struct StateKernel {
    pub k: u32,
    pub d: usize,
    pub center: PureState,
    pub normalizer: f64,
}

impl StateKernel {
    pub fn new(k: u32, center: PureState) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("kernel degree must be positive".into()));
        }
        let d = center.dim();
        Ok(StateKernel {
            k,
            d,
            center,
            normalizer: 1.0 / binomial((d as u64) + k as u64 - 1, k as u64),
        })
    }
}

pub fn state_kernel_eval(kern: &StateKernel, psi: &PureState) -> Result<f64> {
    Ok(kern.center.overlap(psi)?.powi(kern.k as i32) / kern.normalizer)
}

/// `(mean, sample std)` of the kernel over Haar states.
pub fn state_kernel_mc<R: Rng + ?Sized>(kern: &StateKernel, n: usize, rng: &mut R) -> (f64, f64) {
    let base = fork_seed(rng);
    let vals = par_collect(n, base, "kernel.mean", |r| {
        state_kernel_eval(kern, &haar_state(kern.d, r).unwrap()).unwrap()
    });
    crate::stats::mean_and_std(&vals)
}

/// `exp(−kε⁴/8)`, valid for `k ≥ 4d/ε²`.
pub fn state_kernel_tail_bound(d: usize, k: u32, eps: f64) -> Result<f64> {
    check_dim(d)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("radius {eps} outside (0, 1]")));
    }
    if (k as f64) < 4.0 * d as f64 / (eps * eps) {
        return Err(Error::Domain(format!(
            "kernel tail bound needs k ≥ 4d/ε² = {}, got k = {k}",
            4.0 * d as f64 / (eps * eps)
        )));
    }
    Ok((-(k as f64) * eps.powi(4) / 8.0).exp())
}

/// Kernel mass outside `B(φ, ε)`: a regularized incomplete Beta function.
pub fn state_kernel_tail_exact(d: usize, k: u32, eps: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension("kernel tail needs d ≥ 2".into()));
    }
    let x = (1.0 - eps * eps).clamp(0.0, 1.0);
    Ok(beta_reg(k as f64 + 1.0, d as f64 - 1.0, x))
}

/// Monte Carlo kernel mass outside `B(φ, ε)`: `(mean, standard error)`.
pub fn state_kernel_tail_mc<R: Rng + ?Sized>(
    d: usize,
    k: u32,
    eps: f64,
    n: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let kern = StateKernel::new(k, PureState::basis(d, 0)?)?;
    let base = fork_seed(rng);
    let thresh = 1.0 - eps * eps;
    let vals = par_collect(n, base, "kernel.tail", |r| {
        let psi = haar_state(d, r).unwrap();
        let x = psi.amplitudes()[0].norm_sqr();
        if x < thresh {
            x.powi(k as i32) / kern.normalizer
        } else {
            0.0
        }
    });
    let (m, s) = crate::stats::mean_and_std(&vals);
    Ok((m, s / (n as f64).sqrt()))
}
