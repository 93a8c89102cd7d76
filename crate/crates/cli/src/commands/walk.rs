use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use complexity_lab::complexity::{annotate_trace, enumerate_words, Alphabet, DedupMode};
use complexity_lab::ensembles::{walk, ArchSpec, RecordMode};

use super::{gateset_arch, prepare};
use crate::config::RunConfig;
use crate::output::{num, opt_int};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub arch: ArchSpec,
    pub t_max: usize,
    /// One complexity column per entry; gateset architectures only.
    pub eps: Vec<f64>,
    pub depth: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            arch: gateset_arch("ht", 1),
            t_max: 100,
            eps: Vec::new(),
            depth: 12,
        }
    }
}

pub fn run(cfg: &mut RunConfig, flags: &Value, quiet: bool) -> Result<i32> {
    let (p, ctx): (Params, _) = prepare(cfg, flags, quiet)?;
    let arch = p.arch.build()?;
    let mut rng = ctx.rng("walk");
    let record = if p.eps.is_empty() {
        RecordMode::Summary
    } else {
        RecordMode::Full
    };
    let mut trace = walk(&arch, p.t_max, record, &p.eps, &mut rng)?;
    trace.seed = Some(ctx.seed);
    if !p.eps.is_empty() {
        let Some(gs) = arch.gateset.as_ref() else {
            bail!("complexity columns need a gateset architecture");
        };
        let alphabet = Alphabet::from_gateset(gs, &arch.graph)?;
        let en = enumerate_words(&alphabet, p.depth, DedupMode::ExactDedup);
        annotate_trace(&mut trace, &en)?;
    }

    let mut w = ctx.csv("walk.csv")?;
    let mut header = vec!["t".to_string(), "dist_to_id".to_string()];
    header.extend(p.eps.iter().map(|e| format!("c_eps={e}")));
    w.write_record(&header)?;
    let discrete = !arch.is_continuous();
    for i in 0..trace.len() {
        let t = if discrete { i.to_string() } else { num(trace.times[i]) };
        let mut rec = vec![t, num(trace.dist_to_id[i])];
        if let Some(cols) = &trace.complexity {
            rec.extend(cols.iter().map(|c| opt_int(c[i])));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;

    let final_dist = *trace.dist_to_id.last().expect("trace starts at t = 0");
    ctx.json(
        "walk.json",
        &serde_json::json!({
            "arch_id": trace.arch_id,
            "seed": ctx.seed,
            "steps": p.t_max,
            "eps": p.eps,
            "search_depth": p.depth,
            "final_dist_to_id": final_dist,
        }),
    )?;
    ctx.say(format!("{}: {} steps, final D(U, I) = {final_dist:.6}", trace.arch_id, p.t_max));
    Ok(0)
}
