mod common;

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmtree::arith::prime_factors;
use qmtree::order::{check_order, eichler_order, maximal_order, Order};
use qmtree::splitting::{local_splitting, mat2_mul, splitting_mod_l};
use qmtree::{Algebra, Error, Int, Rat};

fn alg(a: i64, b: i64) -> Arc<Algebra> {
    Arc::new(Algebra::from_ints(a, b).unwrap())
}

/// Discriminant from the solubility oracle alone.
fn oracle_discriminant(a: &Rat, b: &Rat) -> u64 {
    let sa = (a.numer() * a.denom()).to_i64().unwrap();
    let sb = (b.numer() * b.denom()).to_i64().unwrap();
    prime_factors(&Int::from(2 * sa * sb))
        .into_iter()
        .filter(|&p| !common::padic_solvable(sa, sb, p as i64))
        .product()
}

fn random_indefinite(rng: &mut ChaCha8Rng) -> Algebra {
    loop {
        let mut draw = || {
            let n: i64 = rng.gen_range(-24..=24);
            let d: i64 = if rng.gen_bool(0.3) { rng.gen_range(2..=5) } else { 1 };
            Rat::new(n.into(), d.into())
        };
        let (a, b) = (draw(), draw());
        let positive = |x: &Rat| x.numer() > &Int::zero();
        if a.is_zero() || b.is_zero() || !(positive(&a) || positive(&b)) {
            continue;
        }
        return Algebra::new(a, b).unwrap();
    }
}

#[test]
fn maximal_orders_have_the_algebra_discriminant() {
    let mut algebras: Vec<Algebra> =
        [(-1, 3), (-1, 11), (1, 1)].iter().map(|&(a, b)| Algebra::from_ints(a, b).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    algebras.extend((0..10).map(|_| random_indefinite(&mut rng)));
    for a in algebras {
        let expected = oracle_discriminant(a.a(), a.b());
        assert_eq!(a.discriminant(), Int::from(expected));
        let o = maximal_order(Arc::new(a.clone())).unwrap();
        assert!(check_order(&a, o.lattice()).is_order());
        assert!(o.contains_order(&Order::standard(Arc::new(a.clone()))));
        assert_eq!(o.reduced_discriminant().unwrap(), Int::from(expected), "({}, {})", a.a(), a.b());
        assert!(o.is_maximal().unwrap());
    }
}

#[test]
fn definite_algebras_are_maximalized_too() {
    for (a, b, d) in [(-1, -1, 2), (-1, -3, 3), (-2, -5, 5)] {
        let o = maximal_order(alg(a, b)).unwrap();
        assert_eq!(o.reduced_discriminant().unwrap(), Int::from(d));
    }
}

#[test]
fn eichler_orders_have_discriminant_dn() {
    let cases = [((-1, 3), 6, 1), ((-1, 3), 6, 5), ((-1, 3), 6, 7), ((-2, 5), 10, 3), ((-1, 11), 22, 1)];
    for ((a, b), d, n) in cases {
        let o0 = maximal_order(alg(a, b)).unwrap();
        assert_eq!(o0.reduced_discriminant().unwrap(), Int::from(d));
        let o = eichler_order(&o0, &Int::from(n), 3).unwrap();
        assert_eq!(o.reduced_discriminant().unwrap(), Int::from(d * n), "D={d} N={n}");
        assert!(o0.contains_order(&o));
        assert_eq!(o0.index_of(o.lattice()).unwrap(), Int::from(n));
        assert!(check_order(o.algebra(), o.lattice()).is_order());
        assert_eq!(o.is_maximal().unwrap(), n == 1);
    }
    // composite squarefree level
    let o0 = maximal_order(alg(-1, 3)).unwrap();
    let o = eichler_order(&o0, &Int::from(35), 3).unwrap();
    assert_eq!(o.reduced_discriminant().unwrap(), Int::from(210));
}

#[test]
fn eichler_preconditions() {
    let o0 = maximal_order(alg(-1, 3)).unwrap();
    for n in [4, 3, 2, 0] {
        assert!(matches!(eichler_order(&o0, &Int::from(n), 1), Err(Error::Precondition(_))), "N={n}");
    }
    let lipschitz = Order::standard(alg(-1, -1));
    assert!(matches!(eichler_order(&lipschitz, &Int::from(5), 1), Err(Error::Precondition(_))));
}

#[test]
fn splittings_carry_norm_and_trace() {
    let o = maximal_order(alg(-1, 3)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (ell, k) in [(5u64, 1u32), (5, 3), (7, 2), (13, 1), (11, 2)] {
        let s = local_splitting(&o, ell, k, 42).unwrap();
        let q = Int::from(ell).pow(k);
        for _ in 0..100 {
            let c: Vec<Int> = (0..4).map(|_| Int::from(rng.gen_range(-10i64..=10))).collect();
            let x = o.element(&c);
            let m = s.apply(&c);
            let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
            let tr = &m[0][0] + &m[1][1];
            let nrd = o.algebra().nrd_coords(&x);
            let trd = o.algebra().trd_coords(&x);
            assert!(nrd.is_integer() && trd.is_integer());
            assert!((det - nrd.to_integer()).is_multiple_of(&q), "det at {ell}^{k}");
            assert!((tr - trd.to_integer()).is_multiple_of(&q), "trace at {ell}^{k}");
            let d: Vec<Int> = (0..4).map(|_| Int::from(rng.gen_range(-10i64..=10))).collect();
            let xy = o.algebra().mul_coords(&x, &o.element(&d));
            let lhs = s.apply_element(&o, &xy).unwrap();
            assert_eq!(lhs, mat2_mul(&m, &s.apply(&d), &q));
        }
        let one = s.apply(&o.one_in_basis());
        assert!(one[0][0].is_one() && one[1][1].is_one() && one[0][1].is_zero() && one[1][0].is_zero());
    }
}

#[test]
fn splitting_rejects_ramified_and_composite() {
    let o = maximal_order(alg(-1, 3)).unwrap();
    assert!(splitting_mod_l(&o, 2, 0).is_err());
    assert!(splitting_mod_l(&o, 3, 0).is_err());
    assert!(splitting_mod_l(&o, 15, 0).is_err());
    let e = eichler_order(&o, &Int::from(5), 0).unwrap();
    assert!(splitting_mod_l(&e, 5, 0).is_err());
    assert!(splitting_mod_l(&e, 7, 0).is_ok());
}
