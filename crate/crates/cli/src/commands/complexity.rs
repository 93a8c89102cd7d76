use std::collections::BTreeMap;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use complexity_lab::complexity::{enumerate_states, enumerate_words, Alphabet, ComplexityResult, DedupMode};
use complexity_lab::ensembles::GateSet;
use complexity_lab::graph::Graph;
use complexity_lab::{haar_state, haar_unitary, PureState};

use super::prepare;
use crate::config::RunConfig;
use crate::output::{num, opt_int};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Unitary,
    State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Net,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub gateset: String,
    pub n: usize,
    pub graph: String,
    pub space: Target,
    pub eps: Vec<f64>,
    pub r_max: usize,
    pub mode: Mode,
    pub net_radius: f64,
    pub targets: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            gateset: "ht".into(),
            n: 1,
            graph: "chain".into(),
            space: Target::Unitary,
            eps: vec![0.1, 0.2, 0.3],
            r_max: 12,
            mode: Mode::Exact,
            net_radius: 0.01,
            targets: 100,
        }
    }
}

pub fn run(cfg: &mut RunConfig, flags: &Value, quiet: bool) -> Result<i32> {
    let (p, ctx): (Params, _) = prepare(cfg, flags, quiet)?;
    let gs = GateSet::resolve(&p.gateset)?;
    let alphabet = if p.n == 1 && gs.locality == 1 {
        Alphabet::native(&gs)
    } else {
        Alphabet::from_gateset(&gs, &Graph::named(&p.graph, p.n)?)?
    };
    let mode = match p.mode {
        Mode::Exact => DedupMode::ExactDedup,
        Mode::Net => {
            if p.net_radius.is_nan() || p.net_radius <= 0.0 {
                bail!("net_radius = {} must be positive", p.net_radius);
            }
            DedupMode::NetDedup(p.net_radius)
        }
    };
    let d = alphabet.dim();
    let mut rng = ctx.rng("complexity.targets");

    let (levels, results): (Vec<usize>, Vec<Vec<ComplexityResult>>) = match p.space {
        Target::Unitary => {
            let targets = (0..p.targets).map(|_| haar_unitary(d, &mut rng)).collect::<Result<Vec<_>, _>>()?;
            let en = enumerate_words(&alphabet, p.r_max, mode);
            let res = targets
                .par_iter()
                .map(|u| p.eps.iter().map(|&e| en.complexity(u.matrix(), e)).collect())
                .collect();
            (en.level_sizes(), res)
        }
        Target::State => {
            let targets = (0..p.targets).map(|_| haar_state(d, &mut rng)).collect::<Result<Vec<_>, _>>()?;
            let en = enumerate_states(&alphabet, &PureState::basis(d, 0)?, p.r_max, mode)?;
            let res = targets
                .par_iter()
                .map(|s| p.eps.iter().map(|&e| en.complexity(s, e)).collect())
                .collect();
            (en.level_sizes(), res)
        }
    };
    let truncated = results.iter().flatten().any(|r| r.truncated);

    let mut w = ctx.csv("complexity.csv")?;
    w.write_record(["target_id", "eps", "value", "witness_length", "mode", "truncated"])?;
    for (i, row) in results.iter().enumerate() {
        for r in row {
            w.write_record([
                i.to_string(),
                num(r.eps),
                opt_int(r.value),
                opt_int(r.witness.as_ref().map(|w| w.len())),
                r.mode.label(),
                r.truncated.to_string(),
            ])?;
        }
    }
    w.flush()?;
    let mut w = ctx.csv("levels.csv")?;
    w.write_record(["level", "size"])?;
    for (l, s) in levels.iter().enumerate() {
        w.write_record([l.to_string(), s.to_string()])?;
    }
    w.flush()?;

    // Per-ε histogram of values; values beyond the search depth are counted apart.
    let mut summary = Vec::new();
    for (j, &eps) in p.eps.iter().enumerate() {
        let mut hist: BTreeMap<u32, usize> = BTreeMap::new();
        let mut above = 0;
        for row in &results {
            match row[j].value {
                Some(v) => *hist.entry(v).or_default() += 1,
                None => above += 1,
            }
        }
        ctx.say(format!(
            "eps = {eps}: {} of {} targets within depth {}, histogram {:?}",
            p.targets - above,
            p.targets,
            p.r_max,
            hist
        ));
        summary.push(serde_json::json!({"eps": eps, "histogram": hist, "above_depth": above}));
    }
    ctx.json(
        "complexity.json",
        &serde_json::json!({
            "alphabet": alphabet.labels,
            "dim": d,
            "mode": mode.label(),
            "level_sizes": levels,
            "truncated": truncated,
            "seed": ctx.seed,
            "per_eps": summary,
        }),
    )?;
    Ok(0)
}
