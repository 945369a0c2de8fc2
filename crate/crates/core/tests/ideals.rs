use std::collections::BTreeSet;
use std::sync::Arc;

use qmtree::ideal::{
    compose, enumerate_left_ideals_bruteforce, enumerate_left_ideals_bruteforce_up_to, left_ideals_of_norm_l,
    two_sided_ideal, LeftIdeal,
};
use qmtree::isogeny::build_ideal_tree;
use qmtree::order::{eichler_order, maximal_order, Order};
use qmtree::{Algebra, Error, Int, IntMatrix};

fn maximal(a: i64, b: i64) -> Arc<Order> {
    Arc::new(maximal_order(Arc::new(Algebra::from_ints(a, b).unwrap())).unwrap())
}

fn keys(v: &[LeftIdeal]) -> BTreeSet<IntMatrix> {
    v.iter().map(|i| i.order_coords().clone()).collect()
}

fn expected_count(o: &Order, ell: u64) -> usize {
    let disc = o.reduced_discriminant().unwrap();
    if (disc % ell) == Int::from(0) {
        1
    } else {
        ell as usize + 1
    }
}

#[test]
fn norm_l_ideals_match_the_oracle_at_level_one() {
    let o = maximal(-1, 3);
    for (ell, count) in [(2, 1), (3, 1), (5, 6), (7, 8)] {
        let fast = left_ideals_of_norm_l(&o, ell, 1).unwrap();
        assert_eq!(fast.len(), count, "ell={ell}");
        let slow = enumerate_left_ideals_bruteforce(&o, ell).unwrap();
        assert_eq!(keys(&fast), keys(&slow), "ell={ell}");
        for i in &fast {
            assert_eq!(i.norm().unwrap(), Int::from(ell));
            assert_eq!(i.index(), Int::from(ell * ell));
            assert!(i.is_primitive());
            assert_eq!(i.right_order().unwrap().reduced_discriminant().unwrap(), Int::from(6));
        }
    }
}

#[test]
fn ramified_ideals_square_to_l() {
    for (a, b, primes) in [(-1, 3, vec![2, 3]), (-2, 5, vec![2, 5])] {
        let o = maximal(a, b);
        for ell in primes {
            let p = two_sided_ideal(&o, ell).unwrap();
            let p2 = compose(&p, &p).unwrap();
            assert_eq!(p2, LeftIdeal::scalar(o.clone(), &Int::from(ell)).unwrap());
            assert_eq!(p.right_order().unwrap(), *o);
        }
    }
}

#[test]
fn counts_across_discriminants() {
    for (a, b) in [(-2, 5), (-1, 11)] {
        let o = maximal(a, b);
        for ell in [2, 3, 5, 7] {
            let got = left_ideals_of_norm_l(&o, ell, 5).unwrap();
            assert_eq!(got.len(), expected_count(&o, ell), "({a},{b}) ell={ell}");
        }
    }
}

#[test]
fn eichler_level_counts() {
    let o0 = maximal(-1, 3);
    let o = Arc::new(eichler_order(&o0, &Int::from(5), 2).unwrap());
    for ell in [2, 3, 7] {
        let fast = left_ideals_of_norm_l(&o, ell, 2).unwrap();
        assert_eq!(fast.len(), expected_count(&o0, ell), "ell={ell}");
        assert_eq!(keys(&fast), keys(&enumerate_left_ideals_bruteforce(&o, ell).unwrap()));
    }
    // regression value: 2ℓ + 1 left ideals of norm ℓ at ℓ | N
    let at5 = left_ideals_of_norm_l(&o, 5, 2).unwrap();
    assert_eq!(at5.len(), 11);
    assert_eq!(keys(&at5), keys(&enumerate_left_ideals_bruteforce(&o, 5).unwrap()));
}

#[test]
fn primitive_norm_25_ideals() {
    let o = maximal(-1, 3);
    let all = enumerate_left_ideals_bruteforce_up_to(&o, 25, 25).unwrap();
    let primitive: Vec<LeftIdeal> = all.iter().filter(|i| i.is_primitive()).cloned().collect();
    assert_eq!(primitive.len(), 30);
    // the only imprimitive one is 5O
    assert_eq!(all.len(), 31);
    let tree = build_ideal_tree(&o, 5, 2, 0).unwrap();
    assert_eq!(keys(&tree.levels()[2]), keys(&primitive));
}

#[test]
fn oracle_guard() {
    let o = maximal(-1, 3);
    assert!(matches!(enumerate_left_ideals_bruteforce(&o, 14), Err(Error::Resource(_))));
    assert!(left_ideals_of_norm_l(&o, 4, 0).is_err());
}

#[test]
fn seeds_do_not_change_results() {
    let o = maximal(-1, 3);
    let a = keys(&left_ideals_of_norm_l(&o, 7, 0).unwrap());
    for seed in [1, 99, u64::MAX] {
        assert_eq!(keys(&left_ideals_of_norm_l(&o, 7, seed).unwrap()), a);
    }
}
