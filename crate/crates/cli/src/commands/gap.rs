use anyhow::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use complexity_lab::graph::Graph;
use complexity_lab::moments::{
    design_depth_formulas, design_hamiltonian, spectral_gap, BoundInputs, Formula, GapReport,
};

use super::prepare;
use crate::config::RunConfig;
use crate::output::{num, opt_num};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub n: Vec<usize>,
    pub q: usize,
    pub k: Vec<usize>,
    pub graph: String,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: vec![2, 3],
            q: 2,
            k: vec![1, 2],
            graph: "chain".into(),
        }
    }
}

#[derive(Serialize)]
struct Point {
    n: usize,
    q: usize,
    k: usize,
    graph_id: String,
    report: GapReport,
    lb_path_coupling: Option<f64>,
    lb_polynomial: Option<f64>,
}

fn point(n: usize, q: usize, k: usize, graph: &str) -> Result<Point> {
    let g = Graph::named(graph, n)?;
    let report = spectral_gap(&design_hamiltonian(n, q, k, &g)?)?;
    let inputs = BoundInputs {
        n: Some(n as f64),
        q: Some(q as f64),
        ..Default::default()
    };
    let lb = design_depth_formulas(&inputs, Formula::GapLowerBounds).ok();
    Ok(Point {
        n,
        q,
        k,
        graph_id: g.id(),
        report,
        lb_path_coupling: lb.as_ref().and_then(|v| v.get("path_coupling")),
        lb_polynomial: lb.as_ref().and_then(|v| v.get("polynomial")),
    })
}

pub fn run(cfg: &mut RunConfig, flags: &Value, quiet: bool) -> Result<i32> {
    let (p, ctx): (Params, _) = prepare(cfg, flags, quiet)?;
    let grid: Vec<(usize, usize)> = p.n.iter().flat_map(|&n| p.k.iter().map(move |&k| (n, k))).collect();
    let points = grid
        .par_iter()
        .map(|&(n, k)| point(n, p.q, k, &p.graph))
        .collect::<Result<Vec<_>>>()?;

    let mut w = ctx.csv("gap.csv")?;
    w.write_record([
        "n",
        "q",
        "k",
        "graph_id",
        "edges",
        "gap",
        "expander_norm",
        "method",
        "expander_norm_per_site",
        "kernel_dim",
        "lambda_min",
        "lb_path_coupling",
        "lb_polynomial",
    ])?;
    for pt in &points {
        let r = &pt.report;
        w.write_record([
            pt.n.to_string(),
            pt.q.to_string(),
            pt.k.to_string(),
            pt.graph_id.clone(),
            r.edges.to_string(),
            num(r.gap),
            num(r.expander_norm),
            r.method.to_string(),
            num(r.expander_norm_per_site),
            r.kernel_dim.to_string(),
            num(r.lambda_min),
            opt_num(pt.lb_path_coupling),
            opt_num(pt.lb_polynomial),
        ])?;
    }
    w.flush()?;
    ctx.json("gap.json", &serde_json::json!({"graph": p.graph, "points": points}))?;

    ctx.say(format!("{:>3} {:>3} {:>10} {:>10} {:>10}", "n", "k", "gap", "g=1-Δ/|E|", "method"));
    for pt in &points {
        ctx.say(format!(
            "{:>3} {:>3} {:>10.6} {:>10.6} {:>10}",
            pt.n, pt.k, pt.report.gap, pt.report.expander_norm, pt.report.method
        ));
    }
    Ok(0)
}
