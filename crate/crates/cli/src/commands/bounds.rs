use std::collections::BTreeMap;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use complexity_lab::moments::{design_depth_formulas, BoundInputs, Formula, FormulaValue};

use super::prepare;
use crate::config::RunConfig;
use crate::output::num;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// A formula name or `all`.
    pub formula: String,
    pub inputs: BoundInputs,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            formula: "all".into(),
            inputs: BoundInputs::default().with_default_constants(),
        }
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum Outcome {
    Value(FormulaValue),
    Error { error: String },
}

pub fn run(cfg: &mut RunConfig, flags: &Value, quiet: bool) -> Result<i32> {
    let (p, ctx): (Params, _) = prepare(cfg, flags, quiet)?;
    let formulas: Vec<Formula> = if p.formula == "all" {
        Formula::ALL.to_vec()
    } else {
        vec![p.formula.parse()?]
    };
    let single = formulas.len() == 1;
    let mut results = BTreeMap::new();
    let mut w = ctx.csv("bounds.csv")?;
    w.write_record(["formula", "key", "value"])?;
    for f in formulas {
        match design_depth_formulas(&p.inputs, f) {
            Ok(v) => {
                match &v {
                    FormulaValue::Scalar(x) => {
                        // Always printed, even with --quiet: it is the command's result.
                        println!("{} = {x}", f.name());
                        w.write_record([f.name(), "", &num(*x)])?;
                    }
                    FormulaValue::Record(m) => {
                        for (k, x) in m {
                            println!("{}.{k} = {x}", f.name());
                            w.write_record([f.name(), k, &num(*x)])?;
                        }
                    }
                }
                results.insert(f.name(), Outcome::Value(v));
            }
            Err(e) if single => bail!("{}: {e}", f.name()),
            Err(e) => {
                ctx.say(format!("{}: skipped ({e})", f.name()));
                results.insert(f.name(), Outcome::Error { error: e.to_string() });
            }
        }
    }
    w.flush()?;
    ctx.json(
        "bounds.json",
        &serde_json::json!({"formula": p.formula, "inputs": p.inputs, "results": results}),
    )?;
    Ok(0)
}
