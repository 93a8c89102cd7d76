use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use complexity_lab::geometry::{haar_distance_cdf_qubit, mc_ball_volume, szarek_bounds, vol_state_ball, Space};
use complexity_lab::rng::substream;

use super::prepare;
use crate::config::RunConfig;
use crate::output::{num, opt_num};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolSpace {
    State,
    Unitary,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub space: VolSpace,
    pub d: Vec<usize>,
    pub eps: Vec<f64>,
    pub samples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            space: VolSpace::State,
            d: vec![2],
            eps: vec![0.25, 0.5, 0.75],
            samples: 1_000_000,
        }
    }
}

#[derive(Serialize)]
struct Row {
    d: usize,
    eps: f64,
    hits: u64,
    estimate: f64,
    ci_lo: f64,
    ci_hi: f64,
    exact: Option<f64>,
    szarek_lower: Option<f64>,
    szarek_upper: Option<f64>,
}

pub fn run(cfg: &mut RunConfig, flags: &Value, quiet: bool) -> Result<i32> {
    let (p, ctx): (Params, _) = prepare(cfg, flags, quiet)?;
    let label = match p.space {
        VolSpace::State => "state",
        VolSpace::Unitary => "unitary",
    };
    let mut rows = Vec::new();
    for &d in &p.d {
        for &eps in &p.eps {
            let space = match p.space {
                VolSpace::State => Space::State(d),
                VolSpace::Unitary => Space::Unitary(d),
            };
            let mut rng = substream(ctx.seed, &format!("vol.{label}.{d}.{eps}"), 0);
            let est = mc_ball_volume(space, eps, p.samples, &mut rng)?;
            let (exact, sz) = match p.space {
                VolSpace::State => (Some(vol_state_ball(d, eps)?), None),
                VolSpace::Unitary => {
                    let exact = match d {
                        1 => Some(1.0),
                        2 => Some(haar_distance_cdf_qubit(eps)),
                        _ => None,
                    };
                    (exact, Some(szarek_bounds(d, eps, true)?))
                }
            };
            rows.push(Row {
                d,
                eps,
                hits: est.hits,
                estimate: est.value,
                ci_lo: est.lo,
                ci_hi: est.hi,
                exact,
                szarek_lower: sz.map(|b| b.lower),
                szarek_upper: sz.map(|b| b.upper),
            });
        }
    }

    let mut w = ctx.csv("vol.csv")?;
    w.write_record([
        "space", "d", "eps", "samples", "hits", "estimate", "ci_lo", "ci_hi", "exact", "szarek_lower", "szarek_upper",
    ])?;
    for r in &rows {
        w.write_record([
            label.to_string(),
            r.d.to_string(),
            num(r.eps),
            p.samples.to_string(),
            r.hits.to_string(),
            num(r.estimate),
            num(r.ci_lo),
            num(r.ci_hi),
            opt_num(r.exact),
            opt_num(r.szarek_lower),
            opt_num(r.szarek_upper),
        ])?;
    }
    w.flush()?;
    ctx.json(
        "vol.json",
        &serde_json::json!({"space": label, "samples": p.samples, "seed": ctx.seed, "rows": rows}),
    )?;

    ctx.say(format!("{:>4} {:>8} {:>10} {:>21} {:>10}", "d", "eps", "estimate", "99% CI", "exact"));
    for r in &rows {
        ctx.say(format!(
            "{:>4} {:>8.4} {:>10.6} [{:>9.6}, {:>9.6}] {:>10}",
            r.d,
            r.eps,
            r.estimate,
            r.ci_lo,
            r.ci_hi,
            r.exact.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into())
        ));
    }
    Ok(0)
}
