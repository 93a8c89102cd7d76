//! Closed-form bound calculators. Pure functions of their inputs.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SZAREK_LOWER, SZAREK_UPPER};

/// Gap constant of the local random circuit gap bounds.
pub const C2_GAP: f64 = 1e5;
/// Constant of the design-depth bound for local random circuits.
pub const C1_DESIGN: f64 = 4e7;

/// Documented defaults for the constants left abstract by the theory.
pub const DEFAULT_C_G: f64 = 1.0;
pub const DEFAULT_GAMMA_SK: f64 = 2.0;
pub const DEFAULT_A_SK: f64 = 1.0;

/// `C₁ = c_o^{3/2} / (4 √c^o) · √(2/3)`.
pub fn c1_equid() -> f64 {
    SZAREK_LOWER.powf(1.5) / (4.0 * SZAREK_UPPER.sqrt()) * (2.0f64 / 3.0).sqrt()
}

/// `C₂ = √(2/3) / 4`.
pub fn c2_equid() -> f64 {
    0.25 * (2.0f64 / 3.0).sqrt()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundInputs {
    pub n: Option<f64>,
    pub q: Option<f64>,
    /// Defaults to `q^n`.
    pub d: Option<f64>,
    pub eps: Option<f64>,
    /// Defaults to `min(1 − α, β − 1)`.
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Design accuracy δ.
    pub delta: Option<f64>,
    pub k: Option<f64>,
    pub gateset_size: Option<f64>,
    pub c_g: Option<f64>,
    pub gamma_sk: Option<f64>,
    pub a_sk: Option<f64>,
    /// Number of edges.
    pub m: Option<f64>,
    /// Failure probability Δ.
    pub big_delta: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub r: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub tau: Option<f64>,
    pub tau_s: Option<f64>,
    pub tau_slh: Option<f64>,
    pub t: Option<f64>,
    pub s: Option<f64>,
    pub x: Option<f64>,
    pub lambda: Option<f64>,
    pub kappa: Option<f64>,
}

fn need(v: Option<f64>, name: &'static str) -> Result<f64> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        Some(x) => Err(Error::Domain(format!("`{name}` = {x} is not finite"))),
        None => Err(Error::MissingParameter(name)),
    }
}

fn open_unit(x: f64, name: &str) -> Result<f64> {
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(Error::Domain(format!("`{name}` = {x} must lie in (0, 1)")))
    }
}

fn positive(x: f64, name: &str) -> Result<f64> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::Domain(format!("`{name}` = {x} must be positive")))
    }
}

impl BoundInputs {
    /// Fills `c(𝒢)`, `γ_SK` and `A_SK` with their documented defaults where unset.
    pub fn with_default_constants(mut self) -> Self {
        self.c_g.get_or_insert(DEFAULT_C_G);
        self.gamma_sk.get_or_insert(DEFAULT_GAMMA_SK);
        self.a_sk.get_or_insert(DEFAULT_A_SK);
        self
    }

    pub fn n(&self) -> Result<f64> {
        positive(need(self.n, "n")?, "n")
    }

    pub fn d(&self) -> Result<f64> {
        if let Some(d) = self.d {
            return positive(d, "d");
        }
        let q = positive(need(self.q, "q")?, "q")?;
        Ok(q.powf(self.n()?))
    }

    pub fn eps(&self) -> Result<f64> {
        open_unit(need(self.eps, "eps")?, "eps")
    }

    pub fn gamma(&self) -> Result<f64> {
        if let Some(g) = self.gamma {
            return open_unit(g, "gamma");
        }
        match (self.alpha, self.beta) {
            (Some(a), Some(b)) => open_unit((1.0 - a).min(b - 1.0), "gamma"),
            _ => Err(Error::MissingParameter("gamma")),
        }
    }

    fn log_inv_delta(&self) -> Result<f64> {
        Ok(-open_unit(need(self.delta, "delta")?, "delta")?.ln())
    }

    fn log_g(&self) -> Result<f64> {
        let g = need(self.gateset_size, "gateset_size")?;
        if g < 2.0 {
            return Err(Error::Domain("gateset_size must be at least 2".into()));
        }
        Ok(g.ln())
    }

    fn c_g(&self) -> Result<f64> {
        positive(need(self.c_g, "c_g")?, "c_g")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space2 {
    Unitary,
    State,
}

/// Largest `‖M_ν − M_μ‖` compatible with `(1 ∓ Γ)` equidistribution at scale ε.
pub fn equid_gap_threshold(d: f64, eps: f64, gamma: f64, space: Space2) -> Result<f64> {
    positive(d, "d")?;
    open_unit(eps, "eps")?;
    open_unit(gamma, "gamma")?;
    let g = gamma.powf(1.5);
    Ok(match space {
        Space2::Unitary => (c1_equid() * eps * g).powf(d * d - 1.0),
        Space2::State => (c2_equid() * eps * g).powf(2.0 * (d - 1.0)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Rqc1d,
    Slh,
    Grqc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquidTimes {
    pub tau: f64,
    /// Not available for the continuous-time model.
    pub tau_s: Option<f64>,
}

pub fn equid_time_bounds(inp: &BoundInputs, model: Model) -> Result<EquidTimes> {
    let n = inp.n()?;
    let d = inp.d()?;
    let eps = inp.eps()?;
    let gamma = inp.gamma()?;
    let g32 = gamma.powf(1.5);
    let lu = (1.0 / (c1_equid() * eps * g32)).ln();
    let ls = (1.0 / (c2_equid() * eps * g32)).ln();
    Ok(match model {
        Model::Rqc1d => EquidTimes {
            tau: C2_GAP * n.powi(6) * d.powi(4) * lu,
            tau_s: Some(C2_GAP * n.powi(6) * d.powi(3) * ls),
        },
        Model::Slh => EquidTimes {
            tau: 4.0 * C2_GAP * n.powi(4) * d.powi(4) * lu,
            tau_s: None,
        },
        Model::Grqc => {
            let c = inp.c_g()?;
            let l3 = (1.0 / (eps * gamma)).ln().powi(3);
            EquidTimes {
                tau: c * n.powi(10) * d.powi(4) * l3,
                tau_s: Some(c * n.powi(9) * d.powi(3) * l3),
            }
        }
    })
}

/// `ν(B(U, ε)) ≤ (k! + d^{2k} δ) / (d^{2k} (1 − ε²)^k)` for δ-approximate k-designs.
pub fn design_ball_bound_unitary(d: f64, k: u32, delta: f64, eps: f64) -> Result<f64> {
    design_ball(d, k, delta, eps, 2)
}

/// State analogue with `d^k` in place of `d^{2k}`.
pub fn design_ball_bound_state(d: f64, k: u32, delta: f64, eps: f64) -> Result<f64> {
    design_ball(d, k, delta, eps, 1)
}

/// `(binom(d+k−1, k)^{-1} + δ) / (1 − ε²)^k`, the sharper form before
/// `binom(d+k−1, k) ≥ d^k/k!` is applied. Unlike the `k!` form it keeps
/// decreasing in `k` for small ε.
pub fn design_ball_bound_state_sharp(d: f64, k: u32, delta: f64, eps: f64) -> Result<f64> {
    design_ball(d, k, delta, eps, 1)?;
    let inv_binom: f64 = (1..=k).map(|i| i as f64 / (d + i as f64 - 1.0)).product();
    Ok((inv_binom + delta) / (1.0 - eps * eps).powi(k as i32))
}

fn design_ball(d: f64, k: u32, delta: f64, eps: f64, mult: i32) -> Result<f64> {
    positive(d, "d")?;
    open_unit(eps, "eps")?;
    if k == 0 {
        return Err(Error::Domain("design degree k must be positive".into()));
    }
    if delta < 0.0 {
        return Err(Error::Domain(format!("delta = {delta} must be nonnegative")));
    }
    let kf = k as f64;
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    let dk = d.powi(mult * k as i32);
    Ok((fact + dk * delta) / (dk * (1.0 - eps * eps).powf(kf)))
}

/// `a(r) = ⌊(r / (n² c(𝒢)))^{1/11}⌋`.
pub fn a_of_r(r: f64, n: f64, c_g: f64) -> f64 {
    (r.max(0.0) / (n * n * c_g)).powf(1.0 / 11.0).floor()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    GapRqc,
    GapSlh,
    DesignsK,
    GrqcDesignsK,
    GrqcDesignsUnbounded,
    LinearGrowthLb,
    ComplexityThresholdR,
    #[serde(rename = "recurrence_T1_T2")]
    RecurrenceT1T2,
    ConditionalRecParams,
    EquidThreshold,
    EquidTimeRqc1d,
    EquidTimeSlh,
    EquidTimeGrqc,
    DesignBallUnitary,
    DesignBallState,
    SkUpperBound,
    GapLowerBounds,
    MaximalInequality,
    AnnulusBound,
}

impl Formula {
    pub const ALL: [Formula; 19] = [
        Formula::GapRqc,
        Formula::GapSlh,
        Formula::DesignsK,
        Formula::GrqcDesignsK,
        Formula::GrqcDesignsUnbounded,
        Formula::LinearGrowthLb,
        Formula::ComplexityThresholdR,
        Formula::RecurrenceT1T2,
        Formula::ConditionalRecParams,
        Formula::EquidThreshold,
        Formula::EquidTimeRqc1d,
        Formula::EquidTimeSlh,
        Formula::EquidTimeGrqc,
        Formula::DesignBallUnitary,
        Formula::DesignBallState,
        Formula::SkUpperBound,
        Formula::GapLowerBounds,
        Formula::MaximalInequality,
        Formula::AnnulusBound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Formula::GapRqc => "gap_rqc",
            Formula::GapSlh => "gap_slh",
            Formula::DesignsK => "designs_k",
            Formula::GrqcDesignsK => "grqc_designs_k",
            Formula::GrqcDesignsUnbounded => "grqc_designs_unbounded",
            Formula::LinearGrowthLb => "linear_growth_lb",
            Formula::ComplexityThresholdR => "complexity_threshold_r",
            Formula::RecurrenceT1T2 => "recurrence_T1_T2",
            Formula::ConditionalRecParams => "conditional_rec_params",
            Formula::EquidThreshold => "equid_threshold",
            Formula::EquidTimeRqc1d => "equid_time_rqc1d",
            Formula::EquidTimeSlh => "equid_time_slh",
            Formula::EquidTimeGrqc => "equid_time_grqc",
            Formula::DesignBallUnitary => "design_ball_unitary",
            Formula::DesignBallState => "design_ball_state",
            Formula::SkUpperBound => "sk_upper_bound",
            Formula::GapLowerBounds => "gap_lower_bounds",
            Formula::MaximalInequality => "maximal_inequality",
            Formula::AnnulusBound => "annulus_bound",
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Formula::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown formula `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormulaValue {
    Scalar(f64),
    Record(BTreeMap<String, f64>),
}

impl FormulaValue {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            FormulaValue::Scalar(x) => Some(*x),
            FormulaValue::Record(_) => None,
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        match self {
            FormulaValue::Scalar(_) => None,
            FormulaValue::Record(m) => m.get(key).copied(),
        }
    }
}

fn record<const N: usize>(items: [(&str, f64); N]) -> FormulaValue {
    FormulaValue::Record(items.iter().map(|(k, v)| (k.to_string(), *v)).collect())
}

/// Evaluates one of the closed-form bounds. Constants the theory leaves free
/// (`c_g`, `gamma_sk`, `a_sk`) must be supplied; see
/// [`BoundInputs::with_default_constants`].
pub fn design_depth_formulas(inp: &BoundInputs, which: Formula) -> Result<FormulaValue> {
    use FormulaValue::Scalar;
    match which {
        Formula::GapRqc => {
            let (n, d) = (inp.n()?, inp.d()?);
            Ok(Scalar(C2_GAP * n.powi(6) * d * d * inp.log_inv_delta()?))
        }
        Formula::GapSlh => {
            let (n, d) = (inp.n()?, inp.d()?);
            Ok(Scalar(4.0 * C2_GAP * n.powi(4) * d * d * inp.log_inv_delta()?))
        }
        Formula::DesignsK => {
            let n = inp.n()?;
            let k = positive(need(inp.k, "k")?, "k")?;
            let l = (4.0 * k).ln().ceil();
            Ok(Scalar(C1_DESIGN * n * l * l * k.powf(9.5) * inp.log_inv_delta()?))
        }
        Formula::GrqcDesignsK => {
            let n = inp.n()?;
            let k = positive(need(inp.k, "k")?, "k")?;
            Ok(Scalar(inp.c_g()? * n.powi(3) * k.ln().powi(4) * k.powf(9.5) * inp.log_inv_delta()?))
        }
        Formula::GrqcDesignsUnbounded => {
            let (n, d) = (inp.n()?, inp.d()?);
            let k = positive(need(inp.k, "k")?, "k")?;
            Ok(Scalar(inp.c_g()? * n.powi(7) * k.ln().powi(2) * d * d * inp.log_inv_delta()?))
        }
        Formula::LinearGrowthLb => {
            let (n, d, eps) = (inp.n()?, inp.d()?, inp.eps()?);
            let t = need(inp.t, "t")?;
            let bd = open_unit(need(inp.big_delta, "big_delta")?, "big_delta")?;
            let lg = inp.log_g()?;
            Ok(Scalar(
                (t / (d * d)) * (2.0 * (1.0 - eps * eps)).ln() / (C2_GAP * n.powi(6) * lg) - (1.0 / bd).ln() / lg,
            ))
        }
        Formula::ComplexityThresholdR => {
            let (d, eps) = (inp.d()?, inp.eps()?);
            let beta = positive(need(inp.beta, "beta")?, "beta")?;
            let bd = open_unit(need(inp.big_delta, "big_delta")?, "big_delta")?;
            let lg = inp.log_g()?;
            let l = (1.0 / bd).ln();
            Ok(record([
                ("r_unitary", ((d * d - 1.0) * (1.0 / (SZAREK_UPPER * beta * eps)).ln() - l) / lg),
                ("r_state", ((2.0 * d - 2.0) * (1.0 / (beta * eps)).ln() - l) / lg),
            ]))
        }
        Formula::RecurrenceT1T2 => recurrence_times(inp),
        Formula::ConditionalRecParams => {
            let (d, eps) = (inp.d()?, inp.eps()?);
            let bd = open_unit(need(inp.big_delta, "big_delta")?, "big_delta")?;
            let mut out = BTreeMap::new();
            out.insert("gamma_max_unitary".into(), bd / 6.0 * (SZAREK_LOWER / 3.0).powf(d * d - 1.0));
            out.insert("gamma_max_state".into(), bd * LN_2 / (16.0 * d));
            out.insert("gamma_max_state_conservative".into(), bd / (24.0 * d));
            if let (Some(beta), Some(_)) = (inp.beta, inp.gateset_size) {
                let lg = inp.log_g()?;
                let l = (2.0 / bd).ln();
                out.insert("r_unitary".into(), ((d * d - 1.0) * (1.0 / (SZAREK_UPPER * beta * eps)).ln() - l) / lg);
                out.insert("r_state".into(), ((2.0 * d - 2.0) * (1.0 / (beta * eps)).ln() - l) / lg);
                out.insert("guarantee".into(), 1.0 - 1.5 * bd);
            }
            Ok(FormulaValue::Record(out))
        }
        Formula::EquidThreshold => {
            let (d, eps, g) = (inp.d()?, inp.eps()?, inp.gamma()?);
            Ok(record([
                ("unitary", equid_gap_threshold(d, eps, g, Space2::Unitary)?),
                ("state", equid_gap_threshold(d, eps, g, Space2::State)?),
                ("C1", c1_equid()),
                ("C2", c2_equid()),
            ]))
        }
        Formula::EquidTimeRqc1d | Formula::EquidTimeSlh | Formula::EquidTimeGrqc => {
            let model = match which {
                Formula::EquidTimeRqc1d => Model::Rqc1d,
                Formula::EquidTimeSlh => Model::Slh,
                _ => Model::Grqc,
            };
            let t = equid_time_bounds(inp, model)?;
            let mut out = BTreeMap::new();
            out.insert("tau".into(), t.tau);
            if let Some(ts) = t.tau_s {
                out.insert("tau_s".into(), ts);
            }
            Ok(FormulaValue::Record(out))
        }
        Formula::DesignBallUnitary | Formula::DesignBallState => {
            let (d, eps) = (inp.d()?, inp.eps()?);
            let k = need(inp.k, "k")?;
            if k < 1.0 || k.fract() != 0.0 {
                return Err(Error::Domain(format!("k = {k} must be a positive integer")));
            }
            let delta = need(inp.delta, "delta")?;
            let f = if which == Formula::DesignBallUnitary {
                design_ball_bound_unitary
            } else {
                design_ball_bound_state
            };
            Ok(Scalar(f(d, k as u32, delta, eps)?))
        }
        Formula::SkUpperBound => {
            let (d, eps) = (inp.d()?, inp.eps()?);
            let gamma = need(inp.gamma_sk, "gamma_sk")?;
            if !(gamma > 1.0 && gamma < 3.0) {
                return Err(Error::Domain(format!("gamma_sk = {gamma} must lie in (1, 3)")));
            }
            let a = positive(need(inp.a_sk, "a_sk")?, "a_sk")?;
            Ok(record([
                ("unitary", a * d * d * (d * d / eps).ln().powf(gamma)),
                ("state", a * (2.0 * d - 2.0) * (d / eps).ln().powf(gamma)),
            ]))
        }
        Formula::GapLowerBounds => {
            let n = inp.n()?;
            let q = positive(need(inp.q, "q")?, "q")?;
            let d = inp.d()?;
            Ok(record([
                ("path_coupling", 1.0 / (n * (std::f64::consts::E * (q * q + 1.0)).powf(n))),
                ("polynomial", 1.0 / (C2_GAP * n.powi(4) * d * d)),
            ]))
        }
        Formula::MaximalInequality => {
            let d = inp.d()?;
            let m = positive(need(inp.m, "m")?, "m")?;
            let s = positive(need(inp.s, "s")?, "s")?;
            let x = need(inp.x, "x")?;
            Ok(Scalar(maximal_inequality_bound(d, m, s, x)))
        }
        Formula::AnnulusBound => {
            let d = inp.d()?;
            if d.fract() != 0.0 {
                return Err(Error::Domain("annulus bound needs an integer d".into()));
            }
            let kappa = need(inp.kappa, "kappa")?;
            let lam = need(inp.lambda, "lambda")?;
            Ok(Scalar(crate::geometry::annulus_bound(d as usize, kappa, lam)?))
        }
    }
}

/// `2d · exp(−x²/(2ms))`.
pub fn maximal_inequality_bound(d: f64, m: f64, s: f64, x: f64) -> f64 {
    2.0 * d * (-(x * x) / (2.0 * m * s)).exp()
}

fn recurrence_times(inp: &BoundInputs) -> Result<FormulaValue> {
    let (n, d, eps) = (inp.n()?, inp.d()?, inp.eps()?);
    let alpha = positive(need(inp.alpha, "alpha")?, "alpha")?;
    let beta = positive(need(inp.beta, "beta")?, "beta")?;
    let g = need(inp.gateset_size, "gateset_size")?;
    inp.log_g()?;
    let d1 = open_unit(need(inp.delta1, "delta1")?, "delta1")?;
    let d2 = open_unit(need(inp.delta2, "delta2")?, "delta2")?;
    let r1 = need(inp.r1, "r1")?;
    let r2 = need(inp.r2, "r2")?;
    let a = if r2 == 0.0 { 0.0 } else { a_of_r(r2, n, inp.c_g()?) };
    let ai = a as i32;
    let l2 = (1.0 / d2).ln();
    let du = d * d - 1.0;
    let ds = 2.0 * d - 2.0;
    let one_m = 1.0 - eps * eps;

    let mut out = BTreeMap::new();
    out.insert("a_r2".into(), a);
    out.insert("T1".into(), d1 / g.powf(r1 + 1.0) * (1.0 / (beta * SZAREK_UPPER * eps)).powf(du));
    out.insert("T1_state".into(), d1 / g.powf(r1 + 1.0) * (1.0 / (beta * eps)).powf(ds));
    if let Some(m) = inp.m {
        out.insert(
            "T1_slh".into(),
            d1 / g.powf(r1 + 2.0) / (64.0 * d * d * m) * (1.0 / (2.0 * beta * SZAREK_UPPER * eps)).powf(d * d - 2.0),
        );
    }
    let unitary_tail = (2.0 * a / (d * d * one_m)).powi(ai) * (1.0 / (alpha * SZAREK_LOWER * eps)).powf(du);
    if let Some(tau) = inp.tau {
        out.insert("T2".into(), tau * l2 * unitary_tail);
    }
    if let Some(tau) = inp.tau_slh {
        out.insert("T2_slh".into(), tau * l2 * unitary_tail);
    }
    if let Some(tau_s) = inp.tau_s {
        out.insert(
            "T2_state".into(),
            tau_s * l2 * (a / (d * one_m)).powi(ai) * (1.0 / (alpha * eps)).powf(ds),
        );
    }
    if inp.tau.is_none() && inp.tau_s.is_none() && inp.tau_slh.is_none() {
        return Err(Error::MissingParameter("tau"));
    }
    Ok(FormulaValue::Record(out))
}
