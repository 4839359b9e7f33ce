//! Property suites for the exact-algebra invariants: composition algebra,
//! image/preimage duality, metric axioms, orbit/composition oracle agreement,
//! certificate soundness, hit-set monotonicity, and the shift relation.

use num::{One, Signed, Zero};
use pldyn::classify::{check_shift_relation, ShiftRelation};
use pldyn::family::upper_density;
use pldyn::interval::{hausdorff_distance, rat, Interval, IntervalSet, Rat};
use pldyn::ndsys::{TailCertificate, DEFAULT_NODE_CAP};
use pldyn::testkit;
use proptest::prelude::*;

fn random_set(r: &mut rand_chacha::ChaCha8Rng) -> IntervalSet {
    testkit::random_dyadic_set(r, 5, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_associates_up_to_canonical_form(seed in any::<u64>()) {
        let mut r = testkit::rng(seed);
        let f = testkit::random_plmap(&mut r, 3);
        let g = testkit::random_plmap(&mut r, 3);
        let h = testkit::random_plmap(&mut r, 3);
        prop_assert_eq!(h.compose(&g.compose(&f)), h.compose(&g).compose(&f));
    }

    #[test]
    fn compose_evaluates_pointwise(seed in any::<u64>()) {
        let mut r = testkit::rng(seed);
        let f = testkit::random_plmap(&mut r, 3);
        let g = testkit::random_plmap(&mut r, 3);
        let c = g.compose(&f);
        for i in 0..=96i64 {
            let x = rat(i, 96);
            prop_assert_eq!(
                c.eval(&x).unwrap(),
                g.eval(&f.eval(&x).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn image_distributes_over_union(seed in any::<u64>()) {
        let mut r = testkit::rng(seed);
        let m = testkit::random_plmap(&mut r, 3);
        let s1 = random_set(&mut r);
        let s2 = random_set(&mut r);
        prop_assert_eq!(m.image(&s1.union(&s2)), m.image(&s1).union(&m.image(&s2)));
    }

    #[test]
    fn preimage_membership_matches_eval(seed in any::<u64>()) {
        let mut r = testkit::rng(seed);
        let m = testkit::random_plmap(&mut r, 3);
        let s = random_set(&mut r);
        let pre = m.preimage(&s);
        for i in 0..=128i64 {
            let x = rat(i, 128);
            prop_assert_eq!(
                pre.contains_point(&x),
                s.contains_point(&m.eval(&x).unwrap())
            );
        }
    }

    #[test]
    fn sup_distance_is_a_metric(seed in any::<u64>()) {
        let mut r = testkit::rng(seed);
        let f = testkit::random_plmap(&mut r, 3);
        let g = testkit::random_plmap(&mut r, 3);
        let h = testkit::random_plmap(&mut r, 3);
        let dfg = f.sup_distance(&g);
        prop_assert_eq!(dfg.clone(), g.sup_distance(&f));
        prop_assert!(!dfg.is_negative());
        // identity of indiscernibles on canonical forms
        prop_assert_eq!(dfg.is_zero(), f == g);
        prop_assert_eq!(f.sup_distance(&f), Rat::zero());
        // triangle inequality
        prop_assert!(f.sup_distance(&h) <= &dfg + g.sup_distance(&h));
    }

    #[test]
    fn hausdorff_is_a_metric_on_closures(seed in any::<u64>()) {
        let mut r = testkit::rng(seed);
        let a = random_set(&mut r);
        let b = random_set(&mut r);
        let c = random_set(&mut r);
        let dab = hausdorff_distance(&a, &b).unwrap();
        prop_assert_eq!(dab.clone(), hausdorff_distance(&b, &a).unwrap());
        prop_assert!(!dab.is_negative());
        prop_assert_eq!(hausdorff_distance(&a, &a).unwrap(), Rat::zero());
        let dac = hausdorff_distance(&a, &c).unwrap();
        let dcb = hausdorff_distance(&c, &b).unwrap();
        prop_assert!(dab <= dac + dcb);
    }

    #[test]
    fn zero_slope_maps_crush_a_constructed_witness(seed in any::<u64>()) {
        let mut r = testkit::rng(seed);
        let m = testkit::random_plmap(&mut r, 4);
        let crushed = m.nodes().windows(2).find(|w| w[0].1 == w[1].1);
        match crushed {
            Some(w) => {
                prop_assert!(!m.is_feeble_open());
                // an open interval strictly inside the flat piece collapses
                let third = (&w[1].0 - &w[0].0) / Rat::from_integer(3.into());
                let u: IntervalSet = Interval::open(&w[0].0 + &third, &w[1].0 - &third)
                    .unwrap()
                    .into();
                prop_assert!(!m.image(&u).has_interior());
            }
            None => prop_assert!(m.is_feeble_open()),
        }
    }

    #[test]
    fn hit_sets_grow_with_the_start_set(seed in any::<u64>()) {
        let mut r = testkit::rng(seed);
        let seq = testkit::random_cycle(&mut r, 2, false, 3);
        let u = random_set(&mut r);
        let v = random_set(&mut r);
        let u_big = u.union(&random_set(&mut r));
        let small = seq.hit_set(&u, &v, 120);
        let big = seq.hit_set(&u_big, &v, 120);
        prop_assert!(small.hits.is_subset(&big.hits));
    }
}

#[test]
fn orbit_images_agree_with_composed_prefix() {
    // cross-check the two routes for every n ≤ 8 on seeded random systems
    for seed in 0..40u64 {
        let mut r = testkit::rng(seed);
        let seq = testkit::random_cycle(&mut r, 1 + (seed as usize % 3), false, 3);
        let u = testkit::random_dyadic_set(&mut r, 4, 2);
        let orbit = seq.orbit_images(&u, 8);
        for n in 1..=8usize {
            let composed = seq.compose_prefix(n, DEFAULT_NODE_CAP).unwrap();
            assert_eq!(composed.image(&u), orbit[n - 1], "seed {seed}, n {n}");
        }
    }
}

#[test]
fn certificates_survive_four_extra_periods() {
    let mut checked = 0usize;
    for seed in 0..60u64 {
        let mut r = testkit::rng(seed);
        let seq = testkit::random_cycle(&mut r, 1 + (seed as usize % 2), false, 3);
        let u = testkit::random_dyadic_set(&mut r, 4, 1);
        let v = testkit::random_dyadic_set(&mut r, 4, 1);
        let report = seq.hit_set(&u, &v, 80);
        let (base, period, empty) = match &report.certificate {
            TailCertificate::EventuallyEmpty { base, period, .. } => (*base, *period, true),
            TailCertificate::EventuallyFull { base, period, .. } => (*base, *period, false),
            TailCertificate::Unknown => continue,
        };
        checked += 1;
        let deep = base + 4 * period;
        let orbit = seq.orbit_images(&u, deep);
        for n in base..=deep {
            let hit = orbit[n - 1].intersects(&v);
            if empty {
                assert!(!hit, "seed {seed}: hit at {n} after eventually-empty");
            } else {
                assert!(hit, "seed {seed}: miss at {n} after eventually-full");
            }
        }
    }
    assert!(checked > 10, "too few certificates exercised ({checked})");
}

#[test]
fn shift_relation_on_random_feeble_cycles() {
    for seed in 0..30u64 {
        let mut r = testkit::rng(seed);
        let seq = testkit::random_cycle(&mut r, 2, true, 3);
        let u = testkit::random_dyadic_set(&mut r, 3, 1);
        let v = testkit::random_dyadic_set(&mut r, 3, 1);
        for k in 1..=3usize {
            match check_shift_relation(&seq, &u, &v, k, 150).unwrap() {
                ShiftRelation::Checked { violations, .. } => {
                    assert!(violations.is_empty(), "seed {seed}, k {k}: {violations:?}")
                }
                ShiftRelation::HypothesisFailure { .. } => {
                    panic!("feeble-open maps cannot crush U (seed {seed})")
                }
            }
        }
    }
}

#[test]
fn density_estimate_tracks_certified_exact_value() {
    // |final prefix density - exact| <= (base + period)/h on certified reports
    for seed in 0..60u64 {
        let mut r = testkit::rng(seed);
        let seq = testkit::random_cycle(&mut r, 1 + (seed as usize % 2), false, 3);
        let u = testkit::random_dyadic_set(&mut r, 4, 1);
        let v = testkit::random_dyadic_set(&mut r, 4, 1);
        let h = 400usize;
        let report = seq.hit_set(&u, &v, h);
        let d = upper_density(&report);
        let Some(exact) = d.exact else { continue };
        let (base, period) = (
            report.certificate.base().unwrap(),
            report.certificate.period().unwrap(),
        );
        let err = (report.prefix_density(h) - &exact).abs();
        let bound = Rat::new(((base + period) as i64).into(), (h as i64).into());
        assert!(err <= bound, "seed {seed}: err {err} > bound {bound}");
        // and the estimate brackets correctly: estimate <= 1, >= final density
        assert!(d.estimate <= Rat::one());
    }
}
