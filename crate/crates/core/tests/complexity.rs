use std::collections::BTreeMap;

use complexity_lab::complexity::{
    complexity_state, complexity_unitary, enumerate_states, enumerate_words, low_complexity_packing, stability_check,
    Alphabet, DedupMode, Enumeration,
};
use complexity_lab::ensembles::GateSet;
use complexity_lab::geometry::packing_number_exact;
use complexity_lab::qmath::distance_matrices;
use complexity_lab::rng::seeded;
use complexity_lab::{distance_state, haar_state, haar_unitary, PureState, Unitary, UnitaryChannel};
use rand::Rng;

fn ht() -> Alphabet {
    Alphabet::native(&GateSet::builtin("ht").unwrap())
}

fn exact(r: usize) -> Enumeration {
    enumerate_words(&ht(), r, DedupMode::ExactDedup)
}

fn channel(m: nalgebra::DMatrix<num_complex::Complex64>) -> UnitaryChannel {
    UnitaryChannel::new(Unitary::new(m).unwrap())
}

#[test]
fn frozen_level_sizes() {
    let en = exact(16);
    assert!(!en.truncated());
    assert_eq!(
        en.level_sizes(),
        vec![1, 2, 3, 5, 8, 13, 21, 31, 44, 61, 77, 97, 131, 169, 215, 280, 367]
    );
}

#[test]
fn representatives_are_distinct_and_consistent() {
    let a = ht();
    let en = exact(8);
    let words = en.words_up_to(8);
    assert_eq!(words.len(), en.level_sizes().iter().sum::<usize>());
    for (i, w) in words.iter().enumerate() {
        assert!(w.product_defect(&a) < 1e-10);
        for v in &words[..i] {
            assert!(distance_matrices(w.product.rep.matrix(), v.product.rep.matrix()) >= 1e-9);
        }
    }
    let levels = en.levels();
    assert_eq!(levels[0].representatives.len(), 1);
    assert!(levels[0].representatives[0].is_empty());
    assert!(levels[2].representatives.len() <= 4);
    assert!(levels.iter().enumerate().all(|(r, l)| l.level == r && l.representatives.iter().all(|w| w.len() == r)));
}

#[test]
fn net_dedup_covers_dropped_children() {
    let a = ht();
    for rho in [0.05, 0.2, 0.5] {
        let net = enumerate_words(&a, 3, DedupMode::NetDedup(rho));
        let levels = net.levels();
        for r in 1..=3 {
            let kept: Vec<_> = levels[..=r].iter().flat_map(|l| l.representatives.iter()).collect();
            for parent in &levels[r - 1].representatives {
                for g in 0..a.len() {
                    let child = &a.mats[g] * parent.product.rep.matrix();
                    assert!(
                        kept.iter().any(|k| distance_matrices(&child, k.product.rep.matrix()) <= rho),
                        "rho={rho}: child of {:?} uncovered",
                        parent.indices
                    );
                }
            }
        }
        let reps = net.words_up_to(3);
        for (i, w) in reps.iter().enumerate() {
            assert!(reps[..i].iter().all(|v| distance_matrices(w.product.rep.matrix(), v.product.rep.matrix()) > rho));
        }
        // Every word of length r is within r·ρ of a kept word no longer than it.
        for len in 0..=3u32 {
            for code in 0..(1usize << len) {
                let w: Vec<usize> = (0..len).map(|b| (code >> b) & 1).collect();
                let m = a.product(&w);
                assert!(reps
                    .iter()
                    .any(|k| k.len() <= len as usize && distance_matrices(&m, k.product.rep.matrix()) <= len as f64 * rho + 1e-12));
            }
        }
    }
}

#[test]
fn net_value_is_sandwiched() {
    let r_max = 10;
    let ex = exact(r_max);
    let rho = 0.02;
    let net = enumerate_words(&ht(), r_max, DedupMode::NetDedup(rho));
    assert!(net.total() <= ex.total());
    let mut rng = seeded(500);
    let eps = 0.3;
    for _ in 0..100 {
        let u = haar_unitary(2, &mut rng).unwrap();
        let inf = |v: Option<u32>| v.unwrap_or(u32::MAX);
        let v = inf(net.complexity_value(u.matrix(), eps));
        assert!(inf(ex.complexity_value(u.matrix(), eps)) <= v);
        assert!(v <= inf(ex.complexity_value(u.matrix(), eps - r_max as f64 * rho)));
    }
}

#[test]
fn small_unitary_targets() {
    let a = ht();
    let (h, t) = (a.mats[0].clone(), a.mats[1].clone());
    let id = nalgebra::DMatrix::identity(2, 2);
    for (m, want) in [(id, 0u32), (h.clone(), 1), (&t * &t, 2), (&h * &t * &h, 3), (&t * &t * &t, 3), (t.adjoint(), 7)] {
        let res = complexity_unitary(&channel(m.clone()), &a, 1e-6, 8, DedupMode::ExactDedup).unwrap();
        assert_eq!(res.value, Some(want));
        let w = res.witness.unwrap();
        assert_eq!(w.len(), want as usize);
        assert!(distance_matrices(&a.product(&w.indices), &m) <= 1e-6);
    }
    let s = &t * &t;
    for g in &a.mats {
        assert!(distance_matrices(g, &s) > 1e-6);
    }
    assert!(complexity_unitary(&UnitaryChannel::identity(4), &a, 0.1, 2, DedupMode::ExactDedup).is_err());
}

#[test]
fn complexity_monotone_in_eps() {
    let en = exact(12);
    let mut rng = seeded(501);
    for _ in 0..200 {
        let u = haar_unitary(2, &mut rng).unwrap();
        let vals: Vec<u32> = [0.05, 0.1, 0.2, 0.3, 0.5, 0.8]
            .iter()
            .map(|&e| en.complexity_value(u.matrix(), e).unwrap_or(u32::MAX))
            .collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]), "{vals:?}");
    }
}

#[test]
fn stability_examples() {
    let a = ht();
    let en = exact(10);
    let id = UnitaryChannel::identity(2);
    let r = stability_check(&en, &id, &[], 0.2);
    assert_eq!(r.c_u, r.c_wu);
    let r = stability_check(&en, &id, &[0], 1e-6);
    assert_eq!((r.c_u, r.c_wu, r.holds), (Some(0), Some(1), Some(true)));

    let mut rng = seeded(502);
    for _ in 0..50 {
        let ui: Vec<usize> = (0..3).map(|_| rng.random_range(0..a.len())).collect();
        let w: Vec<usize> = (0..2).map(|_| rng.random_range(0..a.len())).collect();
        let u = channel(a.product(&ui));
        assert_eq!(stability_check(&en, &u, &w, 0.2).holds, Some(true));
    }
}

#[test]
fn state_complexity() {
    let a = ht();
    let zero = PureState::basis(2, 0).unwrap();
    let en = enumerate_states(&a, &zero, 12, DedupMode::ExactDedup).unwrap();
    assert_eq!(en.level_sizes(), vec![1, 1, 1, 2, 3, 5, 6, 7, 9, 13, 16, 21, 28]);
    assert_eq!(en.complexity(&zero, 1e-6).value, Some(0));
    let plus = PureState::new(a.mats[0].column(0).into_owned()).unwrap();
    let res = complexity_state(&plus, &a, &zero, 1e-6, 4, DedupMode::ExactDedup).unwrap();
    assert_eq!(res.value, Some(1));
    let w = res.witness.unwrap();
    let reached = PureState::new(a.product(&w.indices).column(0).into_owned()).unwrap();
    assert!(distance_state(&reached, &plus).unwrap() <= 1e-6);
}

#[test]
fn haar_state_histogram() {
    let a = ht();
    let zero = PureState::basis(2, 0).unwrap();
    let en = enumerate_states(&a, &zero, 12, DedupMode::ExactDedup).unwrap();
    let mut rng = seeded(50);
    let mut hist: BTreeMap<Option<u32>, usize> = BTreeMap::new();
    for _ in 0..100 {
        let psi = haar_state(2, &mut rng).unwrap();
        *hist.entry(en.complexity(&psi, 0.2).value).or_default() += 1;
    }
    let frozen: BTreeMap<Option<u32>, usize> = [
        (None, 1),
        (Some(0), 3),
        (Some(1), 5),
        (Some(2), 2),
        (Some(3), 8),
        (Some(4), 14),
        (Some(5), 16),
        (Some(6), 14),
        (Some(7), 10),
        (Some(8), 11),
        (Some(9), 12),
        (Some(10), 3),
        (Some(12), 1),
    ]
    .into_iter()
    .collect();
    assert_eq!(hist, frozen);
}

#[test]
fn low_complexity_packing_counts() {
    let a = ht();
    let mut rng = seeded(1);
    let zero = low_complexity_packing(&a, 0, 0.3, 1000, &mut rng);
    assert_eq!(zero.packing.count, 1);
    let frozen = [(1usize, 2usize, 3usize), (2, 3, 6), (3, 5, 11), (4, 7, 19)];
    for (r, count, candidates) in frozen {
        let p = low_complexity_packing(&a, r, 0.3, 1000, &mut rng);
        assert!(!p.partial);
        assert_eq!((p.packing.count, p.candidates), (count, candidates));
        assert!(p.packing.verify());
        assert!(p.packing.count <= 2usize.pow(r as u32 + 1));
    }
    let words: Vec<UnitaryChannel> = exact(4).words_up_to(4).into_iter().map(|w| w.product).collect();
    assert_eq!(words.len(), 19);
    assert!(packing_number_exact(&words, 0.3).unwrap() >= 7);
    let sampled = low_complexity_packing(&a, 30, 0.3, 500, &mut rng);
    assert!(sampled.partial && sampled.packing.verify());
}
