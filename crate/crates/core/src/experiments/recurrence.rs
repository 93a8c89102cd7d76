//! Saturation and recurrence of complexity along single walk realizations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{HaarDistanceSample, RefVolume, Verdict, SCHEMA_VERSION};
use crate::complexity::Enumeration;
use crate::ensembles::{slh_step, CircuitArchitecture};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::moments::{design_depth_formulas, BoundInputs, Formula, FormulaValue};
use crate::qmath::{distance_matrices, distance_to_identity, Unitary};
use crate::rng::{fork_seed, par_indexed, Stream};
use crate::stats::{Estimate, CONFIDENCE};

/// Default Monte Carlo sample size for reference ball volumes.
pub const DEFAULT_VOLUME_SAMPLES: usize = 1_000_000;
/// Conditioning events needed before a conditional profile is reported as
/// meaningful.
pub const MIN_CONDITIONING_EVENTS: u64 = 100;

/// Complexity as far as the search can tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    Known(u32),
    /// Larger than the given depth.
    Above(u32),
}

impl Level {
    fn at_least(self, r: u32) -> bool {
        match self {
            Level::Known(v) => v >= r,
            Level::Above(a) => a + 1 >= r,
        }
    }

    fn at_most(self, r: u32) -> bool {
        matches!(self, Level::Known(v) if v <= r)
    }

    fn min(self, other: Level) -> Level {
        match (self, other) {
            (Level::Known(a), Level::Known(b)) => Level::Known(a.min(b)),
            (Level::Known(a), Level::Above(_)) | (Level::Above(_), Level::Known(a)) => Level::Known(a),
            (Level::Above(a), Level::Above(b)) => Level::Above(a.min(b)),
        }
    }

    fn known(self) -> Option<u32> {
        match self {
            Level::Known(v) => Some(v),
            Level::Above(_) => None,
        }
    }
}

struct Oracle<'a> {
    en: Option<&'a Enumeration>,
    eps: f64,
}

impl Oracle<'_> {
    fn depth(&self) -> u32 {
        self.en.map(|e| e.completed_levels() as u32 - 1).unwrap_or(0)
    }

    fn level(&self, u: &CMat) -> Level {
        match self.en {
            Some(en) => match en.complexity_value(u, self.eps) {
                Some(v) => Level::Known(v),
                None => Level::Above(self.depth()),
            },
            None => {
                let d = u.nrows();
                if distance_matrices(u, &CMat::identity(d, d)) <= self.eps {
                    Level::Known(0)
                } else {
                    Level::Above(0)
                }
            }
        }
    }

    fn check(&self, arch: &CircuitArchitecture, need: u32) -> Result<()> {
        if let Some(en) = self.en {
            if en.alphabet.dim() != arch.dim() {
                return Err(Error::DimensionMismatch {
                    left: en.alphabet.dim(),
                    right: arch.dim(),
                });
            }
        }
        if need > self.depth() {
            return Err(Error::InvalidInput(format!(
                "complexity thresholds need search depth {need}, have {}",
                self.depth()
            )));
        }
        Ok(())
    }
}

fn step(arch: &CircuitArchitecture, u: Unitary, rng: &mut Stream) -> Unitary {
    if arch.is_continuous() {
        slh_step(arch, &u, rng).expect("architecture validated")
    } else {
        arch.sample_step_labeled(rng).expect("architecture validated").0.compose(&u)
    }
}

fn gateset_size(arch: &CircuitArchitecture) -> f64 {
    arch.gateset.as_ref().map(|g| g.size() as f64).unwrap_or(1.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecurrenceConfig {
    pub eps: f64,
    /// Saturation: first time with `C_ε ≥ r1`.
    pub r1: u32,
    /// Recurrence: first later time with `C_ε ≤ r2`.
    pub r2: u32,
    pub t_max: usize,
    pub n_realizations: usize,
    /// Block length for block-hit statistics.
    pub tau_block: usize,
    pub alpha: f64,
    pub beta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub volume_samples: usize,
    /// Inputs for the closed-form recurrence times; missing system fields
    /// are filled from the run.
    pub bound_inputs: Option<BoundInputs>,
}

impl Default for RecurrenceConfig {
    fn default() -> Self {
        RecurrenceConfig {
            eps: 0.3,
            r1: 1,
            r2: 0,
            t_max: 10_000,
            n_realizations: 500,
            tau_block: 1,
            alpha: 0.5,
            beta: 1.5,
            delta1: 0.1,
            delta2: 0.1,
            volume_samples: DEFAULT_VOLUME_SAMPLES,
            bound_inputs: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceSample {
    /// `None`: never saturated within `t_max`.
    pub saturation_time: Option<usize>,
    /// `None`: censored at `t_max`.
    pub recurrence_time: Option<usize>,
    /// First block index `j ≥ 1` with `D(U_{jτ}, I) ≤ ε`.
    pub blocks_to_return: Option<usize>,
    /// Minimum complexity over `[saturation_time, recurrence_time)`;
    /// `None` when it exceeds the search depth.
    pub min_complexity_in_window: Option<u32>,
}

/// Volume-based stand-ins for the recurrence timescales, using Monte Carlo
/// ball volumes in place of the Szarek constants (`r2 = 0` form).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McTimescales {
    pub t1: f64,
    pub t2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub schema_version: u32,
    pub arch_id: String,
    pub config: RecurrenceConfig,
    pub search_depth: u32,
    pub samples: Vec<RecurrenceSample>,
    /// Sorted observed recurrence times.
    pub recurrence_times: Vec<usize>,
    pub n_unsaturated: usize,
    pub n_censored: usize,
    pub mean_blocks_to_return: Option<f64>,
    pub n_block_censored: usize,
    pub block_hit: Estimate,
    pub reference: String,
    pub vol_eps: RefVolume,
    pub vol_alpha_eps: RefVolume,
    pub vol_beta_eps: RefVolume,
    /// `|𝒢|^{r2+1} · Vol(βε)`.
    pub block_hit_bound: f64,
    pub mc_timescales: McTimescales,
    pub bounds: Option<FormulaValue>,
    pub bounds_error: Option<String>,
}

impl RecurrenceReport {
    /// Fraction of saturated realizations whose recurrence happens after
    /// `tau` (censored ones count when `t_max > tau`).
    pub fn fraction_exceeding(&self, tau: usize) -> Estimate {
        let sat: Vec<_> = self.samples.iter().filter(|s| s.saturation_time.is_some()).collect();
        let hits = sat
            .iter()
            .filter(|s| match s.recurrence_time {
                Some(t) => t > tau,
                None => self.config.t_max > tau,
            })
            .count();
        Estimate::new(hits as u64, sat.len() as u64, CONFIDENCE)
    }
}

/// Runs `n_realizations` walks of `t_max` steps from the identity and records
/// saturation, recurrence and block-return times.
pub fn run_recurrence<R: Rng + ?Sized>(
    arch: &CircuitArchitecture,
    cfg: &RecurrenceConfig,
    enumeration: Option<&Enumeration>,
    rng: &mut R,
) -> Result<RecurrenceReport> {
    if cfg.r1 <= cfg.r2 {
        return Err(Error::InvalidInput(format!("need r1 > r2, got r1 = {}, r2 = {}", cfg.r1, cfg.r2)));
    }
    if cfg.tau_block == 0 || cfg.n_realizations == 0 {
        return Err(Error::InvalidInput("tau_block and n_realizations must be positive".into()));
    }
    if !(cfg.eps > 0.0 && cfg.eps <= 2.0) {
        return Err(Error::Domain(format!("eps = {} outside (0, 2]", cfg.eps)));
    }
    let oracle = Oracle { en: enumeration, eps: cfg.eps };
    oracle.check(arch, (cfg.r1 - 1).max(cfg.r2))?;
    let d = arch.dim();
    let eps = cfg.eps;
    let tau = cfg.tau_block;

    let base = fork_seed(rng);
    let per: Vec<(RecurrenceSample, u64, u64)> = par_indexed(cfg.n_realizations, base, "recurrence", |_, r| {
        let mut u = Unitary::identity(d);
        let mut sat = None;
        let mut rec = None;
        let mut btr = None;
        let mut min_level: Option<Level> = None;
        let (mut hits, mut blocks) = (0u64, 0u64);
        for t in 1..=cfg.t_max {
            u = step(arch, u, r);
            if t % tau == 0 {
                blocks += 1;
                if distance_to_identity(&u) <= eps {
                    hits += 1;
                    btr.get_or_insert(t / tau);
                }
            }
            if sat.is_none() {
                let l = oracle.level(u.matrix());
                if l.at_least(cfg.r1) {
                    sat = Some(t);
                    min_level = Some(l);
                }
            } else if rec.is_none() {
                let l = oracle.level(u.matrix());
                if l.at_most(cfg.r2) {
                    rec = Some(t);
                } else {
                    min_level = min_level.map(|m| m.min(l));
                }
            }
        }
        let sample = RecurrenceSample {
            saturation_time: sat,
            recurrence_time: rec,
            blocks_to_return: btr,
            min_complexity_in_window: min_level.and_then(Level::known),
        };
        (sample, hits, blocks)
    });

    let samples: Vec<RecurrenceSample> = per.iter().map(|p| p.0).collect();
    let (hits, blocks) = per.iter().fold((0, 0), |(h, b), p| (h + p.1, b + p.2));
    let mut recurrence_times: Vec<usize> = samples.iter().filter_map(|s| s.recurrence_time).collect();
    recurrence_times.sort_unstable();
    let n_unsaturated = samples.iter().filter(|s| s.saturation_time.is_none()).count();
    let n_censored = samples
        .iter()
        .filter(|s| s.saturation_time.is_some() && s.recurrence_time.is_none())
        .count();
    let returned: Vec<usize> = samples.iter().filter_map(|s| s.blocks_to_return).collect();
    let mean_blocks_to_return =
        (!returned.is_empty()).then(|| returned.iter().sum::<usize>() as f64 / returned.len() as f64);

    let reference = HaarDistanceSample::draw(d, cfg.volume_samples, rng)?;
    let vol_eps = reference.volume(eps);
    let vol_alpha_eps = reference.volume(cfg.alpha * eps);
    let vol_beta_eps = reference.volume(cfg.beta * eps);
    let g = gateset_size(arch);
    let block_hit_bound = g.powi(cfg.r2 as i32 + 1) * vol_beta_eps.value;
    let mc_timescales = McTimescales {
        t1: cfg.delta1 / (g.powi(cfg.r1 as i32 + 1) * vol_beta_eps.value),
        t2: tau as f64 * (1.0 / cfg.delta2).ln() / vol_alpha_eps.value,
    };

    let (bounds, bounds_error) = match &cfg.bound_inputs {
        None => (None, None),
        Some(inp) => {
            let mut inp = inp.clone();
            inp.n = inp.n.or(Some(arch.n as f64));
            inp.q = inp.q.or(Some(arch.q as f64));
            inp.eps = inp.eps.or(Some(eps));
            inp.alpha = inp.alpha.or(Some(cfg.alpha));
            inp.beta = inp.beta.or(Some(cfg.beta));
            inp.delta1 = inp.delta1.or(Some(cfg.delta1));
            inp.delta2 = inp.delta2.or(Some(cfg.delta2));
            inp.r1 = inp.r1.or(Some(cfg.r1 as f64));
            inp.r2 = inp.r2.or(Some(cfg.r2 as f64));
            inp.gateset_size = inp.gateset_size.or(arch.gateset.as_ref().map(|g| g.size() as f64));
            inp.tau = inp.tau.or(Some(tau as f64));
            match design_depth_formulas(&inp, Formula::RecurrenceT1T2) {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
    };

    Ok(RecurrenceReport {
        schema_version: SCHEMA_VERSION,
        arch_id: arch.id(),
        config: cfg.clone(),
        search_depth: oracle.depth(),
        samples,
        recurrence_times,
        n_unsaturated,
        n_censored,
        mean_blocks_to_return,
        n_block_censored: cfg.n_realizations - returned.len(),
        block_hit: Estimate::new(hits, blocks, CONFIDENCE),
        reference: "reference=MC".into(),
        vol_eps,
        vol_alpha_eps,
        vol_beta_eps,
        block_hit_bound,
        mc_timescales,
        bounds,
        bounds_error,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionalRow {
    pub big_t: usize,
    pub n_cond: u64,
    /// `C_ε(U_{t−T}) > r_large` given `C_ε(U_t) = 0`.
    pub past_large: Estimate,
    pub future_large: Estimate,
    pub both_large: Estimate,
    /// Largest `C_ε(U_{t+T})` seen; `None` when some value exceeds the
    /// search depth or nothing was conditioned.
    pub max_future_complexity: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionalProfile {
    pub schema_version: u32,
    pub arch_id: String,
    pub eps: f64,
    pub t: usize,
    pub r_large: u32,
    pub n_realizations: usize,
    pub n_cond: u64,
    /// `C_ε(U_t) = 0` on the conditioning event.
    pub zero_at_t: Estimate,
    pub rows: Vec<ConditionalRow>,
    pub verdict: Verdict,
    pub message: String,
}

/// Profile of `P(C_ε(U_{t∓T}) > r | C_ε(U_t) = 0)` over a grid of `T`.
#[allow(clippy::too_many_arguments)]
pub fn conditional_recurrence_profile<R: Rng + ?Sized>(
    arch: &CircuitArchitecture,
    eps: f64,
    t_grid: &[usize],
    t: usize,
    r_large: u32,
    n_realizations: usize,
    enumeration: Option<&Enumeration>,
    rng: &mut R,
) -> Result<ConditionalProfile> {
    let t_span = t_grid.iter().copied().max().unwrap_or(0);
    if t_span > t {
        return Err(Error::InvalidInput(format!("largest T = {t_span} exceeds t = {t}")));
    }
    let oracle = Oracle { en: enumeration, eps };
    oracle.check(arch, r_large)?;
    let d = arch.dim();
    let base = fork_seed(rng);
    type Levels = (Level, Vec<(Level, Level)>);
    let per: Vec<Option<Levels>> = par_indexed(n_realizations, base, "conditional", |_, r| {
        let mut u = Unitary::identity(d);
        let mut window = Vec::with_capacity(2 * t_span + 1);
        for s in 1..=t + t_span {
            u = step(arch, u, r);
            if s + t_span == t {
                window.clear();
            }
            if s + t_span >= t {
                window.push(u.matrix().clone());
            }
            if s == t && distance_to_identity(&u) > eps {
                return None;
            }
        }
        if t_span == t {
            window.insert(0, CMat::identity(d, d));
        }
        let center = oracle.level(&window[t_span]);
        let levels = t_grid
            .iter()
            .map(|&bt| (oracle.level(&window[t_span - bt]), oracle.level(&window[t_span + bt])))
            .collect();
        Some((center, levels))
    });
    let cond: Vec<&Levels> = per.iter().flatten().collect();
    let n_cond = cond.len() as u64;
    let large = |l: Level| !l.at_most(r_large);
    let rows = t_grid
        .iter()
        .enumerate()
        .map(|(i, &bt)| {
            let count = |f: &dyn Fn(&(Level, Level)) -> bool| cond.iter().filter(|c| f(&c.1[i])).count() as u64;
            let max_future = cond.iter().try_fold(None::<u32>, |acc, c| {
                c.1[i].1.known().map(|v| Some(acc.map_or(v, |a: u32| a.max(v))))
            });
            ConditionalRow {
                big_t: bt,
                n_cond,
                past_large: Estimate::new(count(&|p| large(p.0)), n_cond, CONFIDENCE),
                future_large: Estimate::new(count(&|p| large(p.1)), n_cond, CONFIDENCE),
                both_large: Estimate::new(count(&|p| large(p.0) && large(p.1)), n_cond, CONFIDENCE),
                max_future_complexity: max_future.flatten(),
            }
        })
        .collect();
    let zero = cond.iter().filter(|c| c.0 == Level::Known(0)).count() as u64;
    let (verdict, message) = if n_cond < MIN_CONDITIONING_EVENTS {
        (
            Verdict::Inconclusive,
            format!("only {n_cond} conditioning events; raise n_realizations"),
        )
    } else {
        (Verdict::Pass, format!("{n_cond} conditioning events"))
    };
    Ok(ConditionalProfile {
        schema_version: SCHEMA_VERSION,
        arch_id: arch.id(),
        eps,
        t,
        r_large,
        n_realizations,
        n_cond,
        zero_at_t: Estimate::new(zero, n_cond, CONFIDENCE),
        rows,
        verdict,
        message,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaturationRow {
    pub r: u32,
    pub k: usize,
    /// Some time in the window has `C_ε ≤ r`.
    pub event: Estimate,
    /// Fraction of (realization, time) pairs with `C_ε ≤ r`.
    pub per_time: Estimate,
    /// `K · |𝒢|^{r+1} · Vol(βε)`.
    pub bound: f64,
    pub violated: bool,
    /// The search depth did not reach `r`.
    pub inconclusive: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaturationScan {
    pub schema_version: u32,
    pub arch_id: String,
    pub eps: f64,
    pub beta: f64,
    pub start: usize,
    pub n_realizations: usize,
    pub reference: String,
    pub vol_beta_eps: RefVolume,
    pub rows: Vec<SaturationRow>,
    pub verdict: Verdict,
}

/// Frequency of low complexity in windows `[start, start + K)` against the
/// union bound `K · |𝒢|^{r+1} · Vol(βε)`.
#[allow(clippy::too_many_arguments)]
pub fn saturation_window_scan<R: Rng + ?Sized>(
    arch: &CircuitArchitecture,
    eps: f64,
    rs: &[u32],
    ks: &[usize],
    start: usize,
    beta: f64,
    n_realizations: usize,
    volume_samples: usize,
    enumeration: Option<&Enumeration>,
    rng: &mut R,
) -> Result<SaturationScan> {
    if rs.is_empty() || ks.is_empty() || ks.contains(&0) {
        return Err(Error::InvalidInput("need nonempty r and positive K grids".into()));
    }
    let oracle = Oracle { en: enumeration, eps };
    oracle.check(arch, 0)?;
    let depth = oracle.depth();
    let k_max = *ks.iter().max().expect("nonempty");
    let d = arch.dim();
    let base = fork_seed(rng);
    let per: Vec<Vec<Level>> = par_indexed(n_realizations, base, "saturation", |_, r| {
        let mut u = Unitary::identity(d);
        let mut out = Vec::with_capacity(k_max);
        for s in 1..start + k_max {
            u = step(arch, u, r);
            if s >= start {
                out.push(oracle.level(u.matrix()));
            }
        }
        if start == 0 {
            out.insert(0, Level::Known(0));
        }
        out
    });
    let reference = HaarDistanceSample::draw(d, volume_samples, rng)?;
    let vol_beta_eps = reference.volume(beta * eps);
    let g = gateset_size(arch);
    let mut rows = Vec::new();
    for &r in rs {
        for &k in ks {
            let low = |l: &Level| l.at_most(r);
            let events = per.iter().filter(|w| w[..k].iter().any(low)).count() as u64;
            let times: u64 = per.iter().map(|w| w[..k].iter().filter(|l| low(l)).count() as u64).sum();
            let event = Estimate::new(events, n_realizations as u64, CONFIDENCE);
            let bound = k as f64 * g.powi(r as i32 + 1) * vol_beta_eps.value;
            rows.push(SaturationRow {
                r,
                k,
                violated: event.lo > bound,
                per_time: Estimate::new(times, (k * n_realizations) as u64, CONFIDENCE),
                event,
                bound,
                inconclusive: r > depth || enumeration.is_some_and(|e| e.truncated()),
            });
        }
    }
    let verdict = if rows.iter().any(|r| r.violated) {
        Verdict::Fail
    } else if rows.iter().any(|r| r.inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(SaturationScan {
        schema_version: SCHEMA_VERSION,
        arch_id: arch.id(),
        eps,
        beta,
        start,
        n_realizations,
        reference: "reference=MC".into(),
        vol_beta_eps,
        rows,
        verdict,
    })
}
