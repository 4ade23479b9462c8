use std::collections::BTreeSet;

use twistlab_core::ci::{
    c1_coefficient, classify, degree_vectors, euler_char, general_type_checks, sweep, Category,
    DegreeVector,
};

fn raw(d: &DegreeVector) -> Vec<i64> {
    d.degrees().iter().map(|&x| x as i64).collect()
}

#[test]
fn exceptional_tuples_are_the_nonnegative_c1_ones() {
    let found: BTreeSet<Vec<i64>> = degree_vectors(200)
        .iter()
        .filter(|d| c1_coefficient(d) >= 0)
        .map(raw)
        .collect();
    let expected: BTreeSet<Vec<i64>> =
        [vec![2], vec![3], vec![4], vec![2, 2], vec![2, 3], vec![2, 2, 2]].into_iter().collect();
    assert_eq!(found, expected);
}

#[test]
fn general_type_inequality_holds_in_range() {
    for d in degree_vectors(200) {
        if c1_coefficient(&d) < 0 {
            let c = general_type_checks(&d).unwrap();
            assert!(c.holds, "{d}: chi = {}, bound = {}", c.chi, c.bound);
            assert!(c.b2 >= 5);
        }
    }
}

#[test]
fn classify_invariant_under_permutation_and_unit_degrees() {
    for d in degree_vectors(200) {
        let base = classify(&d).unwrap();
        let mut r = raw(&d);
        r.reverse();
        r.push(1);
        r.insert(0, 1);
        assert_eq!(classify(&DegreeVector::new(&r).unwrap()).unwrap(), base);
    }
}

#[test]
fn every_admissible_input_has_nontrivial_square() {
    for v in sweep(200).unwrap() {
        let excluded = matches!(v.category, Category::ExcludedCP2 | Category::ExcludedQuadric);
        assert_eq!(v.tau_squared_nontrivial, !excluded, "{}", v.degrees);
        assert_eq!(v.b2, v.chi - 2);
    }
}

/// Independent evaluation via the Hirzebruch polynomial expansion:
/// `chi = c2 = deg * (binom(n+3, 2) - (n+3) sum d + sum_{i<=j} d_i d_j)`.
fn chi_oracle(d: &[i64]) -> i64 {
    let n3 = d.len() as i64 + 3;
    let deg: i64 = d.iter().product();
    let mut h2 = 0;
    for i in 0..d.len() {
        for j in i..d.len() {
            h2 += d[i] * d[j];
        }
    }
    deg * (n3 * (n3 - 1) / 2 - n3 * d.iter().sum::<i64>() + h2)
}

#[test]
fn euler_characteristic_matches_chern_class_expansion() {
    for d in degree_vectors(200) {
        assert_eq!(euler_char(&d).unwrap(), chi_oracle(&raw(&d)), "{d}");
    }
}
