//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use complexity_lab::complexity::{enumerate_words, stability_check, Alphabet, DedupMode};
use complexity_lab::ensembles::{CircuitArchitecture, GateSet, Normalization};
use complexity_lab::experiments::{
    certify_equidistribution, run_recurrence, slh_drift, slh_stability_test, EquidSpace, RecurrenceConfig,
    Verdict,
};
use complexity_lab::geometry::{arc_cdf, mc_ball_volume, overlap_cdf, vol_state_ball, Space};
use complexity_lab::graph::Graph;
use complexity_lab::linalg::{spectral_norm, CMat};
use complexity_lab::moments::{
    design_ball_bound_state, design_ball_bound_unitary, design_depth_formulas, design_hamiltonian,
    haar_moment_projector, mc_moment_operator, spectral_gap, step_expander_norm, BoundInputs, Formula, C2_GAP,
};
use complexity_lab::qmath::distance_unitary_grid;
use complexity_lab::rng::{par_collect, seeded, substream};
use complexity_lab::stats::ks_statistic;
use complexity_lab::{distance_unitary, haar_state, haar_unitary, shortest_arc, PhaseSet, Unitary, UnitaryChannel};
use rand::Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn state_volume_law() -> Outcome {
    let mut worst = 0.0f64;
    for (i, d) in [2usize, 3, 4].into_iter().enumerate() {
        for (j, eps) in [0.3, 0.5, 0.8].into_iter().enumerate() {
            let start = Instant::now();
            let est = mc_ball_volume(Space::State(d), eps, 1_000_000, &mut substream(11, "vol", (3 * i + j) as u64))
                .map_err(|e| e.to_string())?;
            let exact = vol_state_ball(d, eps).unwrap();
            let secs = start.elapsed().as_secs_f64();
            worst = worst.max(secs);
            if !est.contains(exact) || secs > 60.0 {
                return Err(format!(
                    "d={d} eps={eps}: exact {exact} outside [{}, {}] or slow ({secs:.1}s)",
                    est.lo, est.hi
                ));
            }
        }
    }
    Ok(format!("9 cells inside 99% CI, slowest cell {worst:.2}s"))
}

fn overlap_and_arc_laws() -> Outcome {
    let n = 100_000;
    let overlaps = par_collect(n, 12, "overlap", |r| haar_state(4, r).unwrap().amplitudes()[0].norm_sqr());
    let ks_overlap = ks_statistic(&overlaps, |x| overlap_cdf(4, x.clamp(0.0, 1.0)).unwrap());
    let arcs = par_collect(n, 13, "arc", |r| {
        shortest_arc(&PhaseSet::new((0..3).map(|_| r.random::<f64>() * std::f64::consts::TAU))).unwrap()
    });
    // The closed form holds for r ≤ π; compare the empirical CDF there.
    let mut sorted = arcs.clone();
    sorted.sort_by(f64::total_cmp);
    let nf = sorted.len() as f64;
    let ks_arc = sorted
        .iter()
        .enumerate()
        .take_while(|(_, &x)| x <= std::f64::consts::PI)
        .fold(0.0f64, |acc, (i, &x)| {
            let f = arc_cdf(3, x).unwrap();
            acc.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        });
    ensure(
        ks_overlap < 0.01 && ks_arc < 0.01,
        format!("KS overlap(d=4) {ks_overlap:.4}, arc(d=3) {ks_arc:.4}"),
    )
}

fn distance_oracle() -> Outcome {
    let mut worst_grid = 0.0f64;
    let mut worst_tri = 0.0f64;
    for d in [2usize, 4] {
        let grid_err = (0..10_000u64)
            .into_par_iter()
            .map(|i| {
                let mut r = substream(14, "pairs", i + 100_000 * d as u64);
                let a = UnitaryChannel::new(haar_unitary(d, &mut r).unwrap());
                let b = UnitaryChannel::new(haar_unitary(d, &mut r).unwrap());
                (distance_unitary(&a, &b).unwrap() - distance_unitary_grid(&a, &b, 10_000).unwrap()).abs()
            })
            .reduce(|| 0.0, f64::max);
        let tri = (0..10_000u64)
            .into_par_iter()
            .map(|i| {
                let mut r = substream(15, "triples", i + 100_000 * d as u64);
                let [a, b, c] = [0, 1, 2].map(|_| UnitaryChannel::new(haar_unitary(d, &mut r).unwrap()));
                let ab = distance_unitary(&a, &b).unwrap();
                let bc = distance_unitary(&b, &c).unwrap();
                let ac = distance_unitary(&a, &c).unwrap();
                ac - ab - bc
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        worst_grid = worst_grid.max(grid_err);
        worst_tri = worst_tri.max(tri);
    }
    ensure(
        worst_grid < 1e-5 && worst_tri <= 1e-9,
        format!("max |arc − grid| {worst_grid:.2e}, max triangle excess {worst_tri:.2e}"),
    )
}

fn haar_projector() -> Outcome {
    let mut notes = Vec::new();
    for (d, k) in [(2usize, 1usize), (2, 2), (4, 2)] {
        let p = haar_moment_projector(d, k).map_err(|e| e.to_string())?;
        let m = &p.matrix;
        let idem = spectral_norm(&(m * m - m));
        let herm = spectral_norm(&(m - m.adjoint()));
        let rank = m.trace().re;
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        let mc = mc_moment_operator(|r| haar_unitary(d, r).unwrap(), k, 100_000, &mut seeded(16 + d as u64 * 10 + k as u64))
            .map_err(|e| e.to_string())?;
        let dist = mc.distance(&p).map_err(|e| e.to_string())?;
        if idem >= 1e-9 || herm >= 1e-9 || (rank - fact).abs() > 1e-9 || dist >= 0.02 {
            return Err(format!(
                "(D={d},k={k}): idempotency {idem:.1e}, hermiticity {herm:.1e}, rank {rank:.6}, MC {dist:.4}"
            ));
        }
        notes.push(format!("(D={d},k={k}) rank {rank:.0} MC {dist:.4}"));
    }
    Ok(notes.join("; "))
}

fn design_hamiltonian_checks() -> Outcome {
    let q = 2usize;
    let mut notes = Vec::new();
    for n in [2usize, 3] {
        let mut graphs = vec![Graph::chain(n)];
        if n == 3 {
            graphs.push(Graph::complete(3));
        }
        for g in &graphs {
            for k in [1usize, 2] {
                let h = design_hamiltonian(n, q, k, g).map_err(|e| e.to_string())?;
                let rep = spectral_gap(&h).map_err(|e| e.to_string())?;
                let fact: usize = (1..=k).product();
                let nf = n as f64;
                let d = (q as f64).powi(n as i32);
                let path = 1.0 / (nf * (std::f64::consts::E * (q * q + 1) as f64).powi(n as i32));
                let poly = 1.0 / (C2_GAP * nf.powi(4) * d * d);
                if rep.lambda_min.abs() >= 1e-8 || rep.kernel_dim != fact || rep.gap < path || rep.gap < poly {
                    return Err(format!(
                        "n={n} k={k} {}: lambda_min {:.1e}, kernel {}, gap {}",
                        g.id(),
                        rep.lambda_min,
                        rep.kernel_dim,
                        rep.gap
                    ));
                }
                notes.push(format!("n={n},k={k},{}: gap {:.4}", g.id(), rep.gap));
            }
        }
    }
    let chain = Graph::chain(3);
    let g1 = step_expander_norm(3, 2, 1, &chain, 1).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for t in [2u32, 3] {
        let gt = step_expander_norm(3, 2, 1, &chain, t).map_err(|e| e.to_string())?;
        worst = worst.max((gt - g1.powi(t as i32)).abs());
    }
    let gap = spectral_gap(&design_hamiltonian(3, 2, 1, &chain).unwrap()).unwrap();
    let consistency = (g1 - gap.expander_norm).abs();
    ensure(
        worst < 1e-9 && consistency < 1e-9,
        format!(
            "{}; multiplicativity err {worst:.1e}, g vs 1 − Δ/|E| {consistency:.1e}",
            notes.join(", ")
        ),
    )
}

fn design_ball_bounds() -> Outcome {
    let eps = 0.5;
    let u = mc_ball_volume(Space::Unitary(2), eps, 1_000_000, &mut seeded(17)).map_err(|e| e.to_string())?;
    let s = mc_ball_volume(Space::State(2), eps, 1_000_000, &mut seeded(18)).map_err(|e| e.to_string())?;
    for k in 1..=3u32 {
        let bu = design_ball_bound_unitary(2.0, k, 0.0, eps).unwrap();
        let bs = design_ball_bound_state(2.0, k, 0.0, eps).unwrap();
        if u.lo > bu || s.lo > bs {
            return Err(format!("k={k}: unitary {} vs {bu}, state {} vs {bs}", u.value, s.value));
        }
    }
    Ok(format!("unitary ball {:.4}, state ball {:.4} below bounds for k = 1..3", u.value, s.value))
}

fn slh_checks() -> Outcome {
    let arch = CircuitArchitecture::slh(Graph::chain(2), 2, 1e-2, Normalization::CasimirUnit).map_err(|e| e.to_string())?;
    let mut rng = seeded(19);
    let mut u = Unitary::identity(4);
    for _ in 0..10_000 {
        u = complexity_lab::ensembles::slh_step(&arch, &u, &mut rng).unwrap();
    }
    let defect = u.defect();
    let drift = slh_drift(&arch, 2.0, 4000, &mut seeded(20)).map_err(|e| e.to_string())?;
    let rel = (drift.slope / drift.expected - 1.0).abs();
    let xs = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0];
    let stab = slh_stability_test(&arch, 0.5, &xs, 10_000, &mut seeded(21)).map_err(|e| e.to_string())?;
    ensure(
        defect < 1e-10 && rel < 0.1 && stab.verdict == Verdict::Pass,
        format!(
            "unitarity defect {defect:.1e}, drift slope {:.4} vs {:.4}, maximal inequality {:?}",
            drift.slope, drift.expected, stab.verdict
        ),
    )
}

fn recurrence() -> Outcome {
    let haar = CircuitArchitecture::haar(1, 2).unwrap();
    let mut notes = Vec::new();
    for (i, eps) in [0.3, 0.5].into_iter().enumerate() {
        let cfg = RecurrenceConfig {
            eps,
            r1: 1,
            t_max: 5000,
            n_realizations: 500,
            tau_block: 1,
            ..Default::default()
        };
        let rep = run_recurrence(&haar, &cfg, None, &mut seeded(30 + i as u64)).map_err(|e| e.to_string())?;
        let mean = rep.mean_blocks_to_return.ok_or("no returns")?;
        let target = 1.0 / rep.vol_eps.value;
        let rel = (mean / target - 1.0).abs();
        if rel >= 0.1 || rep.n_block_censored > 0 {
            return Err(format!("eps={eps}: mean blocks {mean:.2} vs 1/Vol {target:.2}"));
        }
        notes.push(format!("eps={eps}: {mean:.2} vs {target:.2}"));
    }

    let gs = GateSet::builtin("ht").unwrap();
    let walk = CircuitArchitecture::grqc_gateset(Graph::chain(1), gs.clone()).unwrap();
    let mut tau = 1usize;
    loop {
        let cert = certify_equidistribution(&walk, EquidSpace::Unitary, tau, 0.3, 0.5, 1.5, 8, 100_000, &mut seeded(10))
            .map_err(|e| e.to_string())?;
        if cert.verdict == Verdict::Pass {
            break;
        }
        tau *= 2;
        if tau > 1024 {
            return Err("gateset walk never certified".into());
        }
    }
    let en = enumerate_words(&Alphabet::native(&gs), 12, DedupMode::ExactDedup);
    let cfg = RecurrenceConfig {
        eps: 0.3,
        r1: 8,
        t_max: 20_000,
        n_realizations: 500,
        tau_block: tau,
        volume_samples: 200_000,
        ..Default::default()
    };
    let rep = run_recurrence(&walk, &cfg, Some(&en), &mut seeded(20)).map_err(|e| e.to_string())?;
    let frac = rep.fraction_exceeding(tau);
    notes.push(format!(
        "gateset walk: {}/{} recurrences after certified tau = {tau}",
        frac.hits, frac.trials
    ));
    ensure(frac.value >= 0.99, notes.join("; "))
}

fn naive_level_sizes(a: &Alphabet, r_max: usize) -> Vec<usize> {
    let mut seen: Vec<CMat> = Vec::new();
    let mut sizes = Vec::new();
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    for r in 0..=r_max {
        let mut fresh: Vec<CMat> = Vec::new();
        for w in &words {
            let m = a.product(w);
            let d = m.nrows();
            let ch = UnitaryChannel::new(Unitary::new(m.clone()).unwrap());
            let dup = seen.iter().chain(fresh.iter()).any(|s| {
                distance_unitary(&ch, &UnitaryChannel::new(Unitary::new(s.clone()).unwrap())).unwrap() < 1e-9
            });
            let _ = d;
            if !dup {
                fresh.push(m);
            }
        }
        sizes.push(fresh.len());
        seen.extend(fresh);
        if r < r_max {
            words = words
                .iter()
                .flat_map(|w| (0..a.len()).map(move |g| [w.as_slice(), &[g]].concat()))
                .collect();
        }
    }
    sizes
}

fn complexity_bfs() -> Outcome {
    let gs = GateSet::builtin("ht").unwrap();
    let a = Alphabet::native(&gs);
    let en = enumerate_words(&a, 12, DedupMode::ExactDedup);
    let sizes = en.level_sizes()[..7].to_vec();
    let frozen = vec![1, 2, 3, 5, 8, 13, 21];
    let naive = naive_level_sizes(&a, 6);
    let h = a.mats[0].clone();
    let t = a.mats[1].clone();
    let targets = [("S", &t * &t, 2u32), ("HTH", &h * &t * &h, 3), ("T†", t.adjoint(), 7)];
    for (name, m, want) in &targets {
        let got = en.complexity(m, 1e-6);
        if got.value != Some(*want) {
            return Err(format!("C({name}) = {:?}, expected {want}", got.value));
        }
    }
    let mut rng = seeded(40);
    let eps_grid = [0.1, 0.2, 0.3, 0.5];
    let mut monotone = true;
    for _ in 0..100 {
        let u = haar_unitary(2, &mut rng).unwrap();
        let vals: Vec<u32> = eps_grid
            .iter()
            .map(|&e| en.complexity_value(u.matrix(), e).unwrap_or(u32::MAX))
            .collect();
        monotone &= vals.windows(2).all(|w| w[1] <= w[0]);
    }
    let mut violations = 0;
    for _ in 0..50 {
        let ui: Vec<usize> = (0..3).map(|_| rng.random_range(0..a.len())).collect();
        let w: Vec<usize> = (0..2).map(|_| rng.random_range(0..a.len())).collect();
        let u = UnitaryChannel::new(Unitary::new(a.product(&ui)).unwrap());
        if stability_check(&en, &u, &w, 0.2).holds != Some(true) {
            violations += 1;
        }
    }
    ensure(
        sizes == frozen && naive == frozen && monotone && violations == 0,
        format!("levels {sizes:?} (naive {naive:?}), S/HTH/T† = 2/3/7, monotone {monotone}, stability violations {violations}"),
    )
}

fn golden_bounds() -> Outcome {
    let i = |f: fn(&mut BoundInputs)| {
        let mut b = BoundInputs::default();
        f(&mut b);
        b
    };
    let cases: Vec<(Formula, BoundInputs, &str, f64)> = vec![
        (Formula::GapRqc, i(|b| { b.n = Some(4.0); b.q = Some(2.0); b.delta = Some(1e-3) }), "", 724330639941.3973),
        (Formula::GapSlh, i(|b| { b.n = Some(3.0); b.q = Some(2.0); b.delta = Some(1e-2) }), "", 9549280897.664907),
        (Formula::DesignsK, i(|b| { b.n = Some(5.0); b.k = Some(3.0); b.delta = Some(1e-4) }), "", 565197334423892.0),
        (Formula::GrqcDesignsK, i(|b| { b.n = Some(3.0); b.k = Some(4.0); b.delta = Some(0.1); b.c_g = Some(1.0) }), "", 120384672.96788667),
        (Formula::GrqcDesignsUnbounded, i(|b| { b.n = Some(3.0); b.q = Some(2.0); b.k = Some(4.0); b.delta = Some(0.1); b.c_g = Some(2.0) }), "", 1238754.8127693452),
        (Formula::EquidTimeRqc1d, i(|b| { b.n = Some(2.0); b.q = Some(2.0); b.eps = Some(0.1); b.gamma = Some(0.5) }), "tau", 19951154844.653416),
        (Formula::EquidTimeRqc1d, i(|b| { b.n = Some(2.0); b.q = Some(2.0); b.eps = Some(0.1); b.gamma = Some(0.5) }), "tau_s", 2019873906.2816508),
        (Formula::EquidTimeGrqc, i(|b| { b.n = Some(2.0); b.q = Some(2.0); b.eps = Some(0.2); b.gamma = Some(0.25); b.c_g = Some(1.0) }), "tau_s", 880965.5576044741),
        (Formula::RecurrenceT1T2, recurrence_inputs(), "T2", 6661972026.245244),
        (Formula::RecurrenceT1T2, recurrence_inputs(), "T1_state", 0.27777777777777773),
        (Formula::LinearGrowthLb, i(|b| { b.n = Some(2.0); b.q = Some(2.0); b.eps = Some(0.5); b.t = Some(1e12); b.big_delta = Some(0.01); b.gateset_size = Some(4.0) }), "", 2852.940282457633),
        (Formula::EquidThreshold, i(|b| { b.d = Some(2.0); b.eps = Some(0.1); b.gamma = Some(0.5) }), "unitary", 1.363024174177056e-16),
    ];
    let extras: Vec<(Formula, BoundInputs, &str, f64)> = vec![
        (Formula::EquidThreshold, i(|b| { b.d = Some(2.0); b.eps = Some(0.1); b.gamma = Some(0.5) }), "state", 5.2083333333333343e-05),
        (Formula::EquidThreshold, i(|b| { b.d = Some(2.0); b.eps = Some(0.1); b.gamma = Some(0.5) }), "C1", 0.00014556138514690728),
        (Formula::EquidThreshold, i(|b| { b.d = Some(2.0); b.eps = Some(0.1); b.gamma = Some(0.5) }), "C2", 0.2041241452319315),
        (Formula::RecurrenceT1T2, recurrence_inputs(), "T1", 2.8122147535422794e-06),
        (Formula::RecurrenceT1T2, recurrence_inputs(), "T2_state", 7368.2722975809465),
        (Formula::EquidTimeSlh, i(|b| { b.n = Some(2.0); b.q = Some(2.0); b.eps = Some(0.1); b.gamma = Some(0.5) }), "tau", 19951154844.653416),
    ];
    let mut worst = 0.0f64;
    for (f, inp, key, want) in cases.iter().chain(&extras) {
        let v = design_depth_formulas(inp, *f).map_err(|e| format!("{f}: {e}"))?;
        let got = if key.is_empty() { v.scalar() } else { v.get(key) }.ok_or(format!("{f}: no `{key}`"))?;
        let rel = ((got - want) / want).abs();
        worst = worst.max(rel);
        if rel > 1e-12 {
            return Err(format!("{f}[{key}] = {got}, expected {want} (rel {rel:.1e})"));
        }
    }
    Ok(format!("{} cases (+{} sub-values), worst relative error {worst:.1e}", cases.len(), extras.len()))
}

fn recurrence_inputs() -> BoundInputs {
    BoundInputs {
        n: Some(1.0),
        q: Some(2.0),
        eps: Some(0.1),
        alpha: Some(0.5),
        beta: Some(1.5),
        gateset_size: Some(2.0),
        delta1: Some(0.1),
        delta2: Some(0.1),
        r1: Some(3.0),
        r2: Some(0.0),
        tau: Some(16.0),
        tau_s: Some(8.0),
        ..Default::default()
    }
}

fn certifier_fixtures() -> Outcome {
    let haar = CircuitArchitecture::haar(1, 2).unwrap();
    let mut verdicts = Vec::new();
    for space in [EquidSpace::State, EquidSpace::Unitary] {
        let c = certify_equidistribution(&haar, space, 1, 0.3, 0.9, 1.1, 8, 200_000, &mut seeded(50))
            .map_err(|e| e.to_string())?;
        verdicts.push((format!("haar/{space:?}"), c.verdict, Verdict::Pass));
    }
    let ht = CircuitArchitecture::grqc_gateset(Graph::chain(1), GateSet::builtin("ht").unwrap()).unwrap();
    for space in [EquidSpace::State, EquidSpace::Unitary] {
        let c = certify_equidistribution(&ht, space, 1, 0.3, 0.5, 1.5, 8, 100_000, &mut seeded(51))
            .map_err(|e| e.to_string())?;
        verdicts.push((format!("ht depth 1/{space:?}"), c.verdict, Verdict::Fail));
    }
    let ok = verdicts.iter().all(|(_, got, want)| got == want);
    ensure(
        ok,
        verdicts
            .iter()
            .map(|(n, g, _)| format!("{n}: {g:?}"))
            .collect::<Vec<_>>()
            .join(", "),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("state volume law", state_volume_law),
        ("overlap and arc laws", overlap_and_arc_laws),
        ("distance oracle", distance_oracle),
        ("Haar projector", haar_projector),
        ("design Hamiltonian", design_hamiltonian_checks),
        ("design ball bounds", design_ball_bounds),
        ("SLH process", slh_checks),
        ("recurrence at d=2", recurrence),
        ("complexity BFS", complexity_bfs),
        ("bound calculators", golden_bounds),
        ("equidistribution certifier", certifier_fixtures),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS  {name} ({secs:.1}s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.1}s): {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
