use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use complexity_lab::ensembles::ArchSpec;
use complexity_lab::experiments::{certify_equidistribution, CellStatus, EquidSpace};

use super::{gateset_arch, prepare, say_verdict};
use crate::config::RunConfig;
use crate::output::num;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub arch: ArchSpec,
    pub space: EquidSpace,
    pub t: usize,
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
    pub centers: usize,
    pub samples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            arch: gateset_arch("ht", 1),
            space: EquidSpace::Unitary,
            t: 16,
            eps: 0.3,
            alpha: 0.5,
            beta: 1.5,
            centers: 8,
            samples: 100_000,
        }
    }
}

fn status(s: CellStatus) -> &'static str {
    match s {
        CellStatus::Inside => "inside",
        CellStatus::Disjoint => "disjoint",
        CellStatus::Overlap => "overlap",
        CellStatus::ZeroHits => "zero_hits",
    }
}

pub fn run(cfg: &mut RunConfig, flags: &Value, quiet: bool) -> Result<i32> {
    let (p, ctx): (Params, _) = prepare(cfg, flags, quiet)?;
    let arch = p.arch.build()?;
    let mut rng = ctx.rng("equid");
    let cert = certify_equidistribution(
        &arch, p.space, p.t, p.eps, p.alpha, p.beta, p.centers, p.samples, &mut rng,
    )?;

    let mut w = ctx.csv("equid_cells.csv")?;
    w.write_record([
        "center",
        "radius",
        "hits",
        "trials",
        "estimate",
        "ci_lo",
        "ci_hi",
        "ref_alpha",
        "ref_alpha_lo",
        "ref_alpha_hi",
        "ref_beta",
        "ref_beta_lo",
        "ref_beta_hi",
        "status",
    ])?;
    for c in &cert.cells {
        let e = &c.estimate;
        w.write_record([
            c.center.to_string(),
            num(c.radius),
            e.hits.to_string(),
            e.trials.to_string(),
            num(e.value),
            num(e.lo),
            num(e.hi),
            num(c.ref_alpha.value),
            num(c.ref_alpha.lo),
            num(c.ref_alpha.hi),
            num(c.ref_beta.value),
            num(c.ref_beta.lo),
            num(c.ref_beta.hi),
            status(c.status).to_string(),
        ])?;
    }
    w.flush()?;
    let mut v = serde_json::to_value(&cert)?;
    v["seed"] = ctx.seed.into();
    ctx.json("equid.json", &v)?;

    let inside = cert.cells.iter().filter(|c| c.status == CellStatus::Inside).count();
    ctx.say(format!(
        "{} at t = {}: {inside} of {} cells inside [Vol(αR), Vol(βR)] ({})",
        cert.arch_id,
        cert.t,
        cert.cells.len(),
        cert.reference
    ));
    say_verdict(&ctx, cert.verdict, &cert.message);
    Ok(cert.verdict.exit_code())
}
