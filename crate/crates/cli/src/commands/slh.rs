use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use complexity_lab::ensembles::ArchSpec;
use complexity_lab::experiments::{slh_drift, slh_stability_test};

use super::{prepare, say_verdict, slh_arch};
use crate::config::RunConfig;
use crate::output::num;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub arch: ArchSpec,
    /// Time horizon.
    pub s: f64,
    pub x: Vec<f64>,
    pub realizations: usize,
    /// Realizations for the trace-decay fit; 0 skips the fit.
    pub drift_realizations: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            arch: slh_arch(2, 0.01),
            s: 1.0,
            x: vec![0.0, 0.5, 1.0, 1.5, 2.0],
            realizations: 2000,
            drift_realizations: 0,
        }
    }
}

pub fn run(cfg: &mut RunConfig, flags: &Value, quiet: bool) -> Result<i32> {
    let (p, ctx): (Params, _) = prepare(cfg, flags, quiet)?;
    let arch = p.arch.build()?;
    let report = slh_stability_test(&arch, p.s, &p.x, p.realizations, &mut ctx.rng("slh.stability"))?;
    let drift = if p.drift_realizations > 0 {
        Some(slh_drift(&arch, p.s, p.drift_realizations, &mut ctx.rng("slh.drift"))?)
    } else {
        None
    };

    let mut w = ctx.csv("slh.csv")?;
    w.write_record(["x", "hits", "trials", "exceed", "exceed_lo", "exceed_hi", "bound", "violated"])?;
    for r in &report.rows {
        let e = &r.exceed;
        w.write_record([
            num(r.x),
            e.hits.to_string(),
            e.trials.to_string(),
            num(e.value),
            num(e.lo),
            num(e.hi),
            num(r.bound),
            r.violated.to_string(),
        ])?;
    }
    w.flush()?;
    let mut v = serde_json::to_value(&report)?;
    v["drift"] = serde_json::to_value(&drift)?;
    v["seed"] = ctx.seed.into();
    ctx.json("slh.json", &v)?;

    ctx.say(format!("{:>6} {:>10} {:>12}", "x", "exceed", "bound"));
    for r in &report.rows {
        ctx.say(format!("{:>6.3} {:>10.6} {:>12.6e}", r.x, r.exceed.value, r.bound));
    }
    if let Some(f) = &drift {
        ctx.say(format!(
            "trace decay slope {:.4} ± {:.4} (expected {:.4})",
            f.slope, f.slope_stderr, f.expected
        ));
    }
    say_verdict(&ctx, report.verdict, if report.monotone { "" } else { "exceedance not monotone" });
    Ok(report.verdict.exit_code())
}
