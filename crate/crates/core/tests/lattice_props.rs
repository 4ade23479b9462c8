mod common;

use proptest::prelude::*;
use twistlab_core::weyl::{reflection_orbit, weyl_closure};
use twistlab_core::{BlowupLattice, HomologyClass};

fn library_set(k: usize, root: bool) -> std::collections::BTreeSet<Vec<i64>> {
    let lat = BlowupLattice::new(k).unwrap();
    let set = if root {
        lat.enumerate_roots()
    } else {
        lat.enumerate_exceptional()
    };
    set.iter().map(|c| c.coords().to_vec()).collect()
}

#[test]
fn exceptional_classes_match_oracle() {
    for k in 1..=8 {
        assert_eq!(library_set(k, false), common::oracle(k, false), "k = {k}");
    }
}

#[test]
fn roots_match_oracle() {
    for k in 2..=8 {
        assert_eq!(library_set(k, true), common::oracle(k, true), "k = {k}");
    }
}

#[test]
fn multiset_oracle_agrees_with_full_box() {
    for k in 1..=5 {
        for root in [false, true] {
            let (a, b) = common::ranges(k, root);
            assert_eq!(
                common::full_box(k, a.clone(), b, root),
                common::multiset(k, a, b, root),
                "k = {k}, root = {root}"
            );
        }
    }
}

#[test]
fn sets_are_closed_under_simple_reflections() {
    for k in 3..=8 {
        let lat = BlowupLattice::new(k).unwrap();
        for set in [lat.enumerate_exceptional(), lat.enumerate_roots()] {
            for r in lat.simple_roots() {
                for a in set.iter() {
                    assert!(set.contains(&lat.reflect(&r, a).unwrap()));
                }
            }
        }
    }
}

#[test]
fn bar_involution_pairs_classes() {
    for k in [7, 8] {
        let lat = BlowupLattice::new(k).unwrap();
        let ex = lat.enumerate_exceptional();
        for a in ex.iter() {
            let b = lat.bar_involution(a).unwrap();
            assert!(ex.contains(&b));
            assert_eq!(lat.bar_involution(&b).unwrap(), *a);
            assert_ne!(b, *a);
        }
    }
}

#[test]
fn root_orbits_are_single() {
    for (k, n) in [(5, 40), (6, 72), (7, 126), (8, 240)] {
        let lat = BlowupLattice::new(k).unwrap();
        let gens = lat.simple_roots();
        let start = &lat.exceptional_divisor(1) - &lat.exceptional_divisor(2);
        let (_, orbit) = reflection_orbit(&lat, &gens, &start, 10_000).unwrap();
        assert_eq!(orbit.len(), n, "k = {k}");
    }
}

#[test]
fn large_closures_are_refused() {
    for k in [7, 8] {
        let lat = BlowupLattice::new(k).unwrap();
        let c = weyl_closure(&lat, &lat.simple_roots(), 1000).unwrap();
        assert_eq!(c.size(), None);
    }
}

fn class(k: usize) -> impl Strategy<Value = HomologyClass> {
    proptest::collection::vec(-6i64..=6, k + 1).prop_map(HomologyClass::new)
}

fn case() -> impl Strategy<Value = (BlowupLattice, HomologyClass, HomologyClass, HomologyClass)> {
    (2usize..=8).prop_flat_map(|k| {
        let lat = BlowupLattice::new(k).unwrap();
        let roots: Vec<HomologyClass> = lat.enumerate_roots().iter().cloned().collect();
        (Just(lat), proptest::sample::select(roots), class(k), class(k))
    })
}

proptest! {
    #[test]
    fn reflection_preserves_pairing((lat, r, x, y) in case()) {
        let rx = lat.reflect(&r, &x).unwrap();
        let ry = lat.reflect(&r, &y).unwrap();
        prop_assert_eq!(lat.pairing(&rx, &ry).unwrap(), lat.pairing(&x, &y).unwrap());
        prop_assert_eq!(lat.reflect(&r, &rx).unwrap(), x);
        prop_assert_eq!(lat.reflect(&r, lat.canonical()).unwrap(), lat.canonical().clone());
    }
}
