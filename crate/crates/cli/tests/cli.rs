use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_complexity-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gap_rqc_bound_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["bounds", "--formula", "gap_rqc", "--n", "4", "--q", "2", "--delta", "1e-3", "--output-dir", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // c₂ n⁶ d² ln(1/δ) with d = qⁿ = 16.
    let expected = 1e5 * 4f64.powi(6) * 16f64.powi(2) * 1000f64.ln();
    let line = stdout(&o);
    let value: f64 = line.trim().strip_prefix("gap_rqc = ").unwrap().parse().unwrap();
    assert!((value - expected).abs() <= 1e-12 * expected, "{line}");
    assert!((value - 724330639941.3973).abs() < 1e-3);
    let summary = read_json(&dir.path().join("bounds.json"));
    assert_eq!(summary["results"]["gap_rqc"].as_f64(), Some(value));
    assert_eq!(summary["schema_version"], 1);
}

#[test]
fn bounds_manifest_records_default_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["bounds", "--formula", "grqc_designs_k", "--n", "3", "--k", "2", "--delta", "0.01", "--output-dir", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = read_json(&dir.path().join("manifest.json"));
    let inputs = &m["params"]["inputs"];
    assert_eq!((inputs["c_g"].as_f64(), inputs["gamma_sk"].as_f64(), inputs["a_sk"].as_f64()), (Some(1.0), Some(2.0), Some(1.0)));
    let o = run(&["bounds", "--formula", "grqc_designs_k", "--n", "3", "--k", "2", "--delta", "0.01", "--c-g", "2", "--output-dir", out]);
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["params"]["inputs"]["c_g"].as_f64(), Some(2.0));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn missing_bound_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bounds", "--formula", "gap_rqc", "--n", "4", "--q", "2", "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("delta"), "{}", stderr(&o));
}

#[test]
fn state_ball_volume() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["vol", "--space", "state", "--d", "2", "--eps", "0.5", "--samples", "1e6", "--output-dir", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(dir.path().join("vol.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let h = r.headers().unwrap().clone();
    let get = |k: &str| -> f64 { rows[0][h.iter().position(|c| c == k).unwrap()].parse().unwrap() };
    assert!((get("estimate") - 0.25).abs() < 0.003);
    assert!(get("ci_lo") <= 0.25 && 0.25 <= get("ci_hi"));
    assert_eq!(get("exact"), 0.25);
    assert_eq!(get("samples"), 1e6);
}

#[test]
fn empty_command_prints_usage() {
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(1));
    assert!((stdout(&o) + &stderr(&o)).contains("Usage"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["vol", "--help"]).status.code(), Some(0));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    fs::write(&cfg, json!({"command": "vol", "params": {"samples": 10, "bogus": 1}}).to_string()).unwrap();
    let o = run(&["vol", "--config", cfg.to_str().unwrap(), "--output-dir", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));

    fs::write(&cfg, json!({"command": "vol", "sneaky": true}).to_string()).unwrap();
    let o = run(&["run", cfg.to_str().unwrap(), "--output-dir", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sneaky"), "{}", stderr(&o));

    fs::write(&cfg, "{\n  \"command\": \"vol\",\n  \"params\": {\"samples\": 10,}\n}").unwrap();
    let o = run(&["run", cfg.to_str().unwrap(), "--output-dir", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        json!({"command": "vol", "master_seed": 9, "params": {"d": [3], "eps": [0.5], "samples": 1000}}).to_string(),
    )
    .unwrap();
    let o = run(&["vol", "--config", cfg.to_str().unwrap(), "--samples", "2000", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["master_seed"], 9);
    assert_eq!(m["params"]["samples"], 2000);
    assert_eq!(m["params"]["d"], json!([3]));
    assert_eq!(m["params"]["space"], "state");
}

#[test]
fn config_for_another_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, json!({"command": "gap"}).to_string()).unwrap();
    let o = run(&["vol", "--config", cfg.to_str().unwrap(), "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

fn replay(args: &[&str], files: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let mut first: Vec<&str> = args.to_vec();
    first.extend(["--output-dir", a.to_str().unwrap(), "--quiet"]);
    let o = run(&first);
    let code = o.status.code();
    assert!(matches!(code, Some(0 | 2 | 3)), "{}", stderr(&o));
    let manifest = a.join("manifest.json");
    let o = run(&["run", manifest.to_str().unwrap(), "--output-dir", b.to_str().unwrap(), "--quiet", "--workers", "1"]);
    assert_eq!(o.status.code(), code, "{}", stderr(&o));
    for f in files {
        let x = fs::read(a.join(f)).unwrap();
        let y = fs::read(b.join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f} differs after replay");
    }
}

#[test]
fn manifest_replay_is_bit_identical() {
    replay(&["vol", "--space", "unitary", "--d", "2,3", "--eps", "0.5,1", "--samples", "20000", "--seed", "5"], &["vol.csv"]);
    replay(&["walk", "--t-max", "30", "--eps", "0.2,0.4", "--depth", "8", "--seed", "7"], &["walk.csv"]);
    replay(&["walk", "--kind", "slh", "--n", "2", "--dt", "0.02", "--t-max", "20"], &["walk.csv"]);
    replay(&["complexity", "--targets", "10", "--eps", "0.2,0.3", "--r-max", "10", "--seed", "3"], &["complexity.csv", "levels.csv"]);
    replay(&["complexity", "--space", "state", "--targets", "5", "--r-max", "8"], &["complexity.csv", "levels.csv"]);
    replay(&["gap", "--n", "2,3", "--k", "1,2"], &["gap.csv"]);
    replay(&["equid-cert", "--t", "4", "--samples", "2000", "--centers", "2", "--seed", "11"], &["equid_cells.csv"]);
    replay(&["slh-stability", "--s", "0.2", "--realizations", "200", "--x", "0,1"], &["slh.csv"]);
    replay(
        &["recur", "--realizations", "20", "--t-max", "200", "--depth", "6", "--r1", "4", "--volume-samples", "2000"],
        &["recurrence.csv"],
    );
    replay(
        &["recur", "--experiment", "saturation", "--realizations", "20", "--depth", "4", "--rs", "0,2", "--ks", "1,5",
          "--start", "10", "--volume-samples", "2000"],
        &["saturation.csv"],
    );
    replay(
        &["recur", "--experiment", "conditional", "--realizations", "100", "--depth", "4", "--t", "20", "--t-grid",
          "0,2,4", "--r-large", "2", "--eps", "0.6"],
        &["conditional.csv"],
    );
    replay(&["bounds", "--n", "3", "--q", "2", "--delta", "0.01", "--k", "2"], &["bounds.csv"]);
}

#[test]
fn walk_trace_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["walk", "--t-max", "12", "--eps", "0.25", "--depth", "3", "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(dir.path().join("walk.csv")).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), vec!["t", "dist_to_id", "c_eps=0.25"]);
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 13);
    assert_eq!(&rows[0][2], "0");
    // Values beyond the search depth are left empty; known values respect it.
    for row in &rows {
        if !row[2].is_empty() {
            assert!(row[2].parse::<u32>().unwrap() <= 3);
        }
    }
    // Each step changes complexity by at most one.
    let vals: Vec<Option<u32>> = rows.iter().map(|r| r[2].parse().ok()).collect();
    for w in vals.windows(2) {
        if let (Some(a), Some(b)) = (w[0], w[1]) {
            assert!(a.abs_diff(b) <= 1);
        }
    }
}

#[test]
fn complexity_columns_need_a_gateset() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["walk", "--kind", "haar", "--eps", "0.3", "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verdicts_set_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // Depth 1 is far from equidistributed at ε = 0.3: a single H or T step.
    let o = run(&["equid-cert", "--t", "1", "--samples", "20000", "--centers", "4", "--output-dir", out]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    let cert = read_json(&dir.path().join("equid.json"));
    assert_eq!(cert["verdict"], "fail");
    assert_eq!(cert["reference"], "reference=MC");

    // The state-space walk at depth 16 sits inside its windows.
    let o = run(&["equid-cert", "--space", "state", "--t", "16", "--samples", "100000", "--output-dir", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = run(&["slh-stability", "--s", "0.5", "--realizations", "400", "--x", "0.5,1,2", "--output-dir", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rep = read_json(&dir.path().join("slh.json"));
    assert_eq!(rep["verdict"], "pass");
}
