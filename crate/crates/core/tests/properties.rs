use std::collections::BTreeSet;

use cyclo_hodge::galois_orbits::{all_pair_orbits, cm_types, is_good_pair};
use cyclo_hodge::hodge_data::{dimension_set, HodgeProfile};
use cyclo_hodge::lemma_engine::{
    decide_even_lemma, invariance_set, is_even, threshold_oracle, FunctionTable, Verdict,
};
use cyclo_hodge::report::VerificationReport;
use cyclo_hodge::unit_group::{prime_powers_in, Unit, UnitGroup};
use proptest::prelude::*;

fn prime_power() -> impl Strategy<Value = UnitGroup> {
    let qs = prime_powers_in(2, 4096);
    (0..qs.len()).prop_map(move |i| UnitGroup::new(qs[i]).unwrap())
}

fn group_and_unit() -> impl Strategy<Value = (UnitGroup, Unit)> {
    prime_power().prop_flat_map(|g| {
        let n = g.units().len();
        (Just(g), 0..n).prop_map(|(g, i)| {
            let u = g.units()[i];
            (g, u)
        })
    })
}

/// `(n, q)` with `4 <= n < q`, `p ∤ n`.
fn small_profile() -> impl Strategy<Value = HodgeProfile> {
    let qs: Vec<u64> = prime_powers_in(5, 512);
    (0..qs.len(), 0u64..1 << 20).prop_filter_map("p | n", move |(i, k)| {
        let q = qs[i];
        let n = 4 + k % (q - 4);
        let g = UnitGroup::new(q).unwrap();
        HodgeProfile::build(n, &g).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inverse_and_lagrange((g, a) in group_and_unit()) {
        prop_assert_eq!(g.mul(a, g.inv(a)), g.one());
        prop_assert_eq!(g.phi() % g.order(a), 0);
        prop_assert_eq!(g.pow(a, g.order(a)), g.one());
    }

    #[test]
    fn subgroup_pm_is_a_subgroup((g, a) in group_and_unit()) {
        let h = g.subgroup_pm(a);
        let set: BTreeSet<Unit> = h.iter().copied().collect();
        prop_assert!(set.contains(&g.one()) && set.contains(&g.minus_one()));
        prop_assert_eq!(g.phi() % h.len() as u64, 0);
        for &x in h.iter().take(40) {
            prop_assert!(set.contains(&g.inv(x)));
            for &y in h.iter().take(40) {
                prop_assert!(set.contains(&g.mul(x, y)));
            }
        }
        let trivial = h.len() <= 2;
        prop_assert_eq!(g.b_max(a) == g.one(), trivial);
    }

    #[test]
    fn step_one_square_bound((g, a) in group_and_unit()) {
        let b = g.b_max(a);
        if b != g.one() {
            prop_assert!(2 * b.residue() * b.residue() > g.q());
        }
    }

    #[test]
    fn involutions(g in prime_power()) {
        let inv: Vec<u64> = g.order_two_elements().iter().map(|u| u.residue()).collect();
        let q = g.q();
        if g.p() == 2 && g.r() >= 3 {
            prop_assert_eq!(inv, vec![q / 2 - 1, q / 2 + 1, q - 1]);
        } else if g.p() != 2 {
            prop_assert_eq!(inv, vec![q - 1]);
        }
    }

    #[test]
    fn conjugation_commutes_with_translation((g, a) in group_and_unit(), k in any::<prop::sample::Index>()) {
        let x = g.units()[k.index(g.units().len())];
        prop_assert_eq!(g.conjugate(g.conjugate(a)), a);
        prop_assert_eq!(g.conjugate(g.mul(x, a)), g.mul(x, g.conjugate(a)));
    }

    #[test]
    fn hquad_shape(profile in small_profile()) {
        let g = profile.group();
        prop_assert!(profile.check_invariants().is_empty());
        let parity = (profile.n() - 1) % 2;
        for &a in g.units() {
            let h = profile.hquad(a);
            let root = (h as f64).sqrt().round() as u64;
            prop_assert_eq!(root * root, h);
            prop_assert_eq!(root % 2, parity);
        }
        // non-constancy for n < q
        let half = g.half_units();
        prop_assert_eq!(profile.mult(half[0]), 0);
        prop_assert!(profile.mult(*half.last().unwrap()) >= 1);
        prop_assert!(!profile.is_h_constant());
    }

    #[test]
    fn factored_difference_vanishes_exactly_on_ties(
        profile in small_profile(),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
    ) {
        let us = profile.group().units();
        let (a, b) = (us[i.index(us.len())], us[j.index(us.len())]);
        let (x, y) = profile.h_difference_factored(a, b);
        let diff = profile.hquad(a) as i64 - profile.hquad(b) as i64;
        prop_assert_eq!(4 * x * y, -diff);
        prop_assert_eq!(x * y == 0, diff == 0);
    }

    #[test]
    fn invariance_set_of_even_functions(profile in small_profile()) {
        let g = profile.group();
        let h = FunctionTable::from_profile(&profile);
        prop_assert!(is_even(g, &h));
        let inv = invariance_set(g, &h);
        let set: BTreeSet<Unit> = inv.iter().copied().collect();
        prop_assert!(set.contains(&g.minus_one()));
        for &x in &inv {
            for &y in &inv {
                prop_assert!(set.contains(&g.mul(x, y)));
            }
        }
        // h is non-constant, so only ±1 can fix it
        prop_assert!(inv.len() <= 2);
    }

    #[test]
    fn rigidity_and_oracle((g, a) in group_and_unit()) {
        let cert = decide_even_lemma(&g, a);
        prop_assert!(cert.check(&g).is_ok());
        let forced = cert.verdict == Verdict::ConstantForced;
        prop_assert_eq!(forced, threshold_oracle(&g, a));
        if a != g.one() && a != g.minus_one() {
            prop_assert!(forced);
        } else {
            prop_assert_eq!(forced, g.half_units().len() == 1);
        }
    }

    #[test]
    fn dimension_identities(profile in small_profile()) {
        let g = profile.group();
        let d = dimension_set(profile.n(), g).unwrap();
        prop_assert_eq!(d.unitary_dim, d.half_deg * d.e_dim * d.e_dim);
        prop_assert_eq!(d.ss_lower_bound, d.half_deg * (d.e_dim * d.e_dim - 1));
        prop_assert!(d.ss_lower_bound * 2 >= g.phi());
    }
}

#[test]
fn pair_orbits_partition_distinct_pairs() {
    for q in prime_powers_in(2, 60) {
        let g = UnitGroup::new(q).unwrap();
        let orbits = all_pair_orbits(&g);
        let mut seen = BTreeSet::new();
        for o in &orbits {
            assert_eq!(o.members.len() as u64, g.phi());
            assert_eq!(o.members[0], o.representative);
            let good = is_good_pair(&g, o.representative.0, o.representative.1);
            for &(a, b) in &o.members {
                assert!(seen.insert((a, b)), "q={q}: pair in two orbits");
                assert_eq!(is_good_pair(&g, a, b), good);
            }
        }
        let phi = g.phi() as usize;
        assert_eq!(seen.len(), phi * (phi - 1));
    }
}

#[test]
fn cm_types_are_valid_and_counted() {
    for q in prime_powers_in(3, 40) {
        let g = UnitGroup::new(q).unwrap();
        let types: Vec<_> = cm_types(&g).unwrap().collect();
        assert_eq!(types.len() as u64, 1 << (g.phi() / 2));
        assert!(types.iter().all(|t| t.is_valid(&g)));
        let distinct: BTreeSet<_> = types.iter().map(|t| t.members.clone()).collect();
        assert_eq!(distinct.len(), types.len());
        for n in (4..q).filter(|n| n % g.p() != 0) {
            let d = dimension_set(n, &g).unwrap();
            let summed: u64 = types[0].members.iter().map(|_| d.e_dim * d.e_dim - 1).sum();
            assert_eq!(summed, d.ss_lower_bound);
        }
    }
}

#[test]
fn report_json_round_trips() {
    for report in [
        cyclo_hodge::lemma_engine::verify_lemma_exhaustive(32),
        cyclo_hodge::criteria::scan_condition_implication(20, 20),
        cyclo_hodge::lemma_engine::verify_separation(
            &HodgeProfile::build(5, &UnitGroup::new(8).unwrap()).unwrap(),
        ),
    ] {
        let text = serde_json::to_string(&report).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
