use complexity_lab::complexity::{enumerate_words, Alphabet, DedupMode};
use complexity_lab::ensembles::{CircuitArchitecture, GateSet, Normalization};
use complexity_lab::experiments::{
    certify_equidistribution, conditional_recurrence_profile, run_recurrence, saturation_window_scan,
    slh_stability_test, EquidSpace, HaarDistanceSample, RecurrenceConfig, Verdict,
};
use complexity_lab::geometry::haar_distance_cdf_qubit;
use complexity_lab::graph::Graph;
use complexity_lab::rng::seeded;

fn ht_walk() -> CircuitArchitecture {
    CircuitArchitecture::grqc_gateset(Graph::chain(1), GateSet::builtin("ht").unwrap()).unwrap()
}

fn first_certified(space: EquidSpace) -> usize {
    let arch = ht_walk();
    let mut t = 1;
    loop {
        let cert = certify_equidistribution(&arch, space, t, 0.3, 0.5, 1.5, 8, 100_000, &mut seeded(10)).unwrap();
        if cert.verdict == Verdict::Pass {
            return t;
        }
        t *= 2;
        assert!(t <= 64, "no certificate up to t = 64");
    }
}

#[test]
fn certified_times_are_frozen() {
    assert_eq!(first_certified(EquidSpace::State), 8);
    assert_eq!(first_certified(EquidSpace::Unitary), 16);
}

#[test]
fn certificate_reports_references() {
    let cert = certify_equidistribution(&ht_walk(), EquidSpace::Unitary, 1, 0.3, 0.5, 1.5, 4, 20_000, &mut seeded(11)).unwrap();
    assert_eq!(cert.verdict, Verdict::Fail);
    assert_eq!(cert.reference, "reference=MC");
    assert_eq!(cert.radii, vec![0.3, 0.6]);
    assert_eq!(cert.cells.len(), 8);
    let state = certify_equidistribution(&ht_walk(), EquidSpace::State, 1, 0.3, 0.5, 1.5, 4, 20_000, &mut seeded(11)).unwrap();
    assert_eq!(state.radii, vec![0.3, 0.6]);
    assert!(state.cells.iter().all(|c| c.ref_alpha.lo == c.ref_alpha.hi));
}

#[test]
fn haar_reference_sample_matches_exact_law() {
    let s = HaarDistanceSample::draw(2, 200_000, &mut seeded(12)).unwrap();
    for r in [0.2, 0.5, 1.0, 1.4] {
        let v = s.volume(r);
        let exact = haar_distance_cdf_qubit(r);
        assert!(v.lo <= exact && exact <= v.hi, "r={r}: {exact} not in [{}, {}]", v.lo, v.hi);
    }
}

#[test]
fn recurrence_report_invariants() {
    let arch = ht_walk();
    let en = enumerate_words(&Alphabet::native(&GateSet::builtin("ht").unwrap()), 10, DedupMode::ExactDedup);
    let cfg = RecurrenceConfig {
        eps: 0.3,
        r1: 6,
        t_max: 3000,
        n_realizations: 60,
        tau_block: 16,
        volume_samples: 100_000,
        ..Default::default()
    };
    let a = run_recurrence(&arch, &cfg, Some(&en), &mut seeded(600)).unwrap();
    let b = run_recurrence(&arch, &cfg, Some(&en), &mut seeded(600)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    for s in &a.samples {
        if let (Some(sat), Some(rec)) = (s.saturation_time, s.recurrence_time) {
            assert!(rec > sat);
        }
        if let Some(m) = s.min_complexity_in_window {
            assert!(m <= 10);
        }
    }
    let returned = a.samples.iter().filter(|s| s.recurrence_time.is_some()).count();
    assert_eq!(returned + a.n_censored + a.n_unsaturated, cfg.n_realizations);
    assert_eq!(a.recurrence_times.len(), returned);
    assert_eq!(a.reference, "reference=MC");
    assert!(a.block_hit.lo <= a.block_hit_bound);

    let bad = RecurrenceConfig { r1: 0, ..cfg };
    assert!(run_recurrence(&arch, &bad, Some(&en), &mut seeded(600)).is_err());
}

#[test]
fn conditional_profile_is_pinned() {
    let arch = ht_walk();
    let en = enumerate_words(&Alphabet::native(&GateSet::builtin("ht").unwrap()), 12, DedupMode::ExactDedup);
    let grid = [0, 1, 2, 4, 8, 16, 32, 64];
    let p = conditional_recurrence_profile(&arch, 0.3, &grid, 200, 3, 20_000, Some(&en), &mut seeded(40)).unwrap();
    assert_eq!(p.n_cond, 242);
    assert_eq!(p.zero_at_t.value, 1.0);
    for row in &p.rows {
        if row.big_t <= 2 {
            assert_eq!(row.future_large.hits, 0);
        }
        if let (Some(c), true) = (row.max_future_complexity, row.big_t <= 8) {
            assert!(c as usize <= row.big_t);
        }
        if row.big_t >= 16 {
            assert!(row.both_large.lo >= 0.5, "T={}: {:?}", row.big_t, row.both_large);
        }
    }
}

#[test]
fn saturation_scan_rows() {
    let arch = ht_walk();
    let en = enumerate_words(&Alphabet::native(&GateSet::builtin("ht").unwrap()), 12, DedupMode::ExactDedup);
    let scan = saturation_window_scan(&arch, 0.3, &[0, 2, 4, 40], &[1, 8, 32], 64, 1.5, 2000, 200_000, Some(&en), &mut seeded(610)).unwrap();
    assert!(scan.rows.iter().all(|r| !r.violated));
    for row in scan.rows.iter().filter(|r| r.r == 40) {
        assert_eq!(row.per_time.value, 1.0);
    }
    assert_ne!(scan.verdict, Verdict::Fail);

    let haar = CircuitArchitecture::haar(1, 2).unwrap();
    let h = saturation_window_scan(&haar, 0.5, &[0], &[1], 1, 1.0, 20_000, 200_000, None, &mut seeded(611)).unwrap();
    let exact = haar_distance_cdf_qubit(0.5);
    let row = &h.rows[0];
    assert!(row.per_time.lo <= exact && exact <= row.per_time.hi);
}

#[test]
fn slh_stability_report() {
    let arch = CircuitArchitecture::slh(Graph::chain(2), 2, 1e-2, Normalization::CasimirUnit).unwrap();
    let xs = [0.0, 0.5, 1.0, 2.0];
    let rep = slh_stability_test(&arch, 0.5, &xs, 2000, &mut seeded(620)).unwrap();
    assert_eq!(rep.m, 1);
    assert_eq!(rep.steps, 50);
    assert!((rep.rows[0].bound - 8.0).abs() < 1e-12);
    assert!((rep.rows[3].bound - 8.0 * (-4f64).exp()).abs() < 1e-12);
    assert!(rep.rows[3].exceed.value <= 4.0 * (-4f64).exp());
    assert!(rep.monotone);
    assert_eq!(rep.verdict, Verdict::Pass);
    let not_slh = CircuitArchitecture::rqc1d(2, 2).unwrap();
    assert!(slh_stability_test(&not_slh, 0.5, &xs, 10, &mut seeded(1)).is_err());
}

#[test]
fn verdict_exit_codes() {
    assert_eq!(Verdict::Pass.exit_code(), 0);
    assert_eq!(Verdict::Fail.exit_code(), 2);
    assert_eq!(Verdict::Inconclusive.exit_code(), 3);
    assert_eq!(serde_json::to_string(&Verdict::Inconclusive).unwrap(), "\"inconclusive\"");
}
