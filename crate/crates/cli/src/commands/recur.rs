use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use complexity_lab::complexity::{enumerate_words, Alphabet, DedupMode, Enumeration};
use complexity_lab::ensembles::{ArchSpec, CircuitArchitecture};
use complexity_lab::experiments::{
    certify_equidistribution, conditional_recurrence_profile, run_recurrence, saturation_window_scan, EquidSpace,
    RecurrenceConfig, Verdict,
};
use complexity_lab::stats::Estimate;

use super::{gateset_arch, prepare, say_verdict};
use crate::config::RunConfig;
use crate::output::{num, opt_int, Ctx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Times,
    Conditional,
    Saturation,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub arch: ArchSpec,
    pub recurrence: RecurrenceConfig,
    pub experiment: Experiment,
    /// Complexity search depth; 0 classifies by distance to the identity.
    pub depth: usize,
    pub certify_tau: bool,
    /// Walk samples and centers per certification attempt.
    pub certify_samples: usize,
    pub certify_centers: usize,
    pub t: usize,
    pub t_grid: Vec<usize>,
    pub r_large: u32,
    pub rs: Vec<u32>,
    pub ks: Vec<usize>,
    pub start: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            arch: gateset_arch("ht", 1),
            recurrence: RecurrenceConfig {
                r1: 8,
                t_max: 2000,
                ..Default::default()
            },
            experiment: Experiment::Times,
            depth: 12,
            certify_tau: false,
            certify_samples: 100_000,
            certify_centers: 8,
            t: 200,
            t_grid: vec![0, 1, 2, 4, 8, 16, 32, 64],
            r_large: 3,
            rs: vec![0, 1, 2, 3],
            ks: vec![1, 10, 100],
            start: 100,
        }
    }
}

#[derive(Serialize)]
struct Certification {
    tried: Vec<(usize, Verdict)>,
    tau: Option<usize>,
}

fn enumeration(arch: &CircuitArchitecture, depth: usize) -> Result<Option<Enumeration>> {
    if depth == 0 {
        return Ok(None);
    }
    let Some(gs) = arch.gateset.as_ref() else {
        bail!("a complexity search needs a gateset architecture; use --depth 0");
    };
    let alphabet = Alphabet::from_gateset(gs, &arch.graph)?;
    Ok(Some(enumerate_words(&alphabet, depth, DedupMode::ExactDedup)))
}

/// First doubling depth whose unitary equidistribution certificate passes.
fn certify_tau(arch: &CircuitArchitecture, p: &Params, ctx: &Ctx) -> Result<Certification> {
    let rc = &p.recurrence;
    let mut rng = ctx.rng("recur.certify");
    let mut tried = Vec::new();
    let mut t = 1;
    while t <= rc.t_max {
        let cert = certify_equidistribution(
            arch,
            EquidSpace::Unitary,
            t,
            rc.eps,
            rc.alpha,
            rc.beta,
            p.certify_centers,
            p.certify_samples,
            &mut rng,
        )?;
        tried.push((t, cert.verdict));
        if cert.verdict == Verdict::Pass {
            return Ok(Certification { tried, tau: Some(t) });
        }
        t *= 2;
    }
    Ok(Certification { tried, tau: None })
}

fn est_cells(e: &Estimate) -> [String; 3] {
    [num(e.value), num(e.lo), num(e.hi)]
}

pub fn run(cfg: &mut RunConfig, flags: &Value, quiet: bool) -> Result<i32> {
    let (mut p, ctx): (Params, _) = prepare(cfg, flags, quiet)?;
    let arch = p.arch.build()?;
    let en = enumeration(&arch, p.depth)?;
    let mut rng = ctx.rng("recur");
    let rc = p.recurrence.clone();

    match p.experiment {
        Experiment::Times => {
            let cert = if p.certify_tau {
                let c = certify_tau(&arch, &p, &ctx)?;
                match c.tau {
                    Some(tau) => {
                        ctx.say(format!("certified block length τ = {tau}"));
                        p.recurrence.tau_block = tau;
                    }
                    None => ctx.say(format!(
                        "no certificate up to t_max = {}; keeping τ = {}",
                        rc.t_max, rc.tau_block
                    )),
                }
                Some(c)
            } else {
                None
            };
            let report = run_recurrence(&arch, &p.recurrence, en.as_ref(), &mut rng)?;
            let mut w = ctx.csv("recurrence.csv")?;
            w.write_record([
                "realization",
                "saturation_time",
                "recurrence_time",
                "blocks_to_return",
                "min_complexity_in_window",
            ])?;
            for (i, s) in report.samples.iter().enumerate() {
                w.write_record([
                    i.to_string(),
                    opt_int(s.saturation_time),
                    opt_int(s.recurrence_time),
                    opt_int(s.blocks_to_return),
                    opt_int(s.min_complexity_in_window),
                ])?;
            }
            w.flush()?;
            let mut v = serde_json::to_value(&report)?;
            v["certification"] = serde_json::to_value(&cert)?;
            v["seed"] = ctx.seed.into();
            ctx.json("recurrence.json", &v)?;
            let n = report.samples.len();
            ctx.say(format!(
                "{}: {} of {n} saturated, {} recurred, {} censored",
                report.arch_id,
                n - report.n_unsaturated,
                report.recurrence_times.len(),
                report.n_censored
            ));
            ctx.say(format!(
                "block hit rate {:.6} [{:.6}, {:.6}] vs bound {:.6} ({})",
                report.block_hit.value,
                report.block_hit.lo,
                report.block_hit.hi,
                report.block_hit_bound,
                report.reference
            ));
            Ok(0)
        }
        Experiment::Conditional => {
            let prof = conditional_recurrence_profile(
                &arch,
                rc.eps,
                &p.t_grid,
                p.t,
                p.r_large,
                rc.n_realizations,
                en.as_ref(),
                &mut rng,
            )?;
            let mut w = ctx.csv("conditional.csv")?;
            w.write_record([
                "T",
                "n_cond",
                "past_large",
                "past_large_lo",
                "past_large_hi",
                "future_large",
                "future_large_lo",
                "future_large_hi",
                "both_large",
                "both_large_lo",
                "both_large_hi",
                "max_future_complexity",
            ])?;
            for r in &prof.rows {
                let mut rec = vec![r.big_t.to_string(), r.n_cond.to_string()];
                rec.extend(est_cells(&r.past_large));
                rec.extend(est_cells(&r.future_large));
                rec.extend(est_cells(&r.both_large));
                rec.push(opt_int(r.max_future_complexity));
                w.write_record(&rec)?;
            }
            w.flush()?;
            let mut v = serde_json::to_value(&prof)?;
            v["seed"] = ctx.seed.into();
            ctx.json("conditional.json", &v)?;
            ctx.say(format!("{} conditioning events at t = {}", prof.n_cond, prof.t));
            say_verdict(&ctx, prof.verdict, &prof.message);
            Ok(prof.verdict.exit_code())
        }
        Experiment::Saturation => {
            let scan = saturation_window_scan(
                &arch,
                rc.eps,
                &p.rs,
                &p.ks,
                p.start,
                rc.beta,
                rc.n_realizations,
                rc.volume_samples,
                en.as_ref(),
                &mut rng,
            )?;
            let mut w = ctx.csv("saturation.csv")?;
            w.write_record([
                "r",
                "k",
                "event",
                "event_lo",
                "event_hi",
                "per_time",
                "per_time_lo",
                "per_time_hi",
                "bound",
                "violated",
                "inconclusive",
            ])?;
            for r in &scan.rows {
                let mut rec = vec![r.r.to_string(), r.k.to_string()];
                rec.extend(est_cells(&r.event));
                rec.extend(est_cells(&r.per_time));
                rec.push(num(r.bound));
                rec.push(r.violated.to_string());
                rec.push(r.inconclusive.to_string());
                w.write_record(&rec)?;
            }
            w.flush()?;
            let mut v = serde_json::to_value(&scan)?;
            v["seed"] = ctx.seed.into();
            ctx.json("saturation.json", &v)?;
            for r in &scan.rows {
                ctx.say(format!(
                    "r = {:>2} K = {:>5}: event {:.6} vs bound {:.6}{}",
                    r.r,
                    r.k,
                    r.event.value,
                    r.bound,
                    if r.violated { "  VIOLATED" } else { "" }
                ));
            }
            say_verdict(&ctx, scan.verdict, "");
            Ok(scan.verdict.exit_code())
        }
    }
}
