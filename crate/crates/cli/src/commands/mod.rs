//! One module per subcommand. Each resolves its parameters, writes the
//! manifest, runs, and returns the process exit code.

mod bounds;
mod complexity;
mod equid;
mod gap;
mod recur;
mod slh;
mod vol;
mod walk;

use anyhow::{bail, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use complexity_lab::ensembles::{ArchKind, ArchSpec, Normalization};
use complexity_lab::experiments::Verdict;

use crate::args::Command;
use crate::config::{resolve, RunConfig};
use crate::output::{write_json, Ctx};

pub const MANIFEST: &str = "manifest.json";

/// The subcommand's flags as a JSON overlay; unset flags become `null`.
pub fn flags(cmd: &Command) -> Result<Value> {
    Ok(match cmd {
        Command::Vol(a) => serde_json::to_value(a)?,
        Command::Gap(a) => serde_json::to_value(a)?,
        Command::Walk(a) => serde_json::to_value(a)?,
        Command::Complexity(a) => serde_json::to_value(a)?,
        Command::Recur(a) => serde_json::to_value(a)?,
        Command::EquidCert(a) => serde_json::to_value(a)?,
        Command::SlhStability(a) => serde_json::to_value(a)?,
        Command::Bounds(a) => serde_json::to_value(a)?,
        Command::Run { .. } => Value::Null,
    })
}

pub fn dispatch(cfg: &mut RunConfig, flags: &Value, quiet: bool) -> Result<i32> {
    match cfg.command.as_str() {
        "vol" => vol::run(cfg, flags, quiet),
        "gap" => gap::run(cfg, flags, quiet),
        "walk" => walk::run(cfg, flags, quiet),
        "complexity" => complexity::run(cfg, flags, quiet),
        "recur" => recur::run(cfg, flags, quiet),
        "equid-cert" => equid::run(cfg, flags, quiet),
        "slh-stability" => slh::run(cfg, flags, quiet),
        "bounds" => bounds::run(cfg, flags, quiet),
        other => bail!(
            "unknown command `{other}`; expected one of vol, gap, walk, complexity, recur, \
             equid-cert, slh-stability, bounds"
        ),
    }
}

/// Resolves parameters, records them in the config and writes the manifest.
fn prepare<P>(cfg: &mut RunConfig, flags: &Value, quiet: bool) -> Result<(P, Ctx)>
where
    P: Serialize + DeserializeOwned + Default,
{
    let params: P = resolve(&cfg.params, flags)?;
    cfg.params = serde_json::to_value(&params)?;
    cfg.output_dir = Some(cfg.output_dir());
    let ctx = Ctx::new(cfg, quiet)?;
    write_json(&ctx.path(MANIFEST), cfg)?;
    Ok((params, ctx))
}

fn say_verdict(ctx: &Ctx, verdict: Verdict, detail: &str) {
    let word = match verdict {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "INCONCLUSIVE",
    };
    if detail.is_empty() {
        ctx.say(format!("verdict: {word}"));
    } else {
        ctx.say(format!("verdict: {word} ({detail})"));
    }
}

fn gateset_arch(name: &str, n: usize) -> ArchSpec {
    ArchSpec {
        kind: ArchKind::GrqcGateset,
        n,
        q: 2,
        graph: None,
        edges: None,
        gateset: Some(name.to_string()),
        dt: None,
        normalization: None,
    }
}

fn slh_arch(n: usize, dt: f64) -> ArchSpec {
    ArchSpec {
        kind: ArchKind::Slh,
        n,
        q: 2,
        graph: None,
        edges: None,
        gateset: None,
        dt: Some(dt),
        normalization: Some(Normalization::default()),
    }
}
