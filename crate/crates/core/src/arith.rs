//! Small integer number theory on arbitrary precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `v_p(n)` for `n ≠ 0`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while n.is_multiple_of(&p) {
        n /= &p;
        v += 1;
    }
    v
}

/// Removes every factor `p` from `n`: returns `(v_p(n), n / p^v)`.
pub fn split_valuation(n: &BigInt, p: u64) -> (u32, BigInt) {
    let v = valuation(n, p);
    (v, n / BigInt::from(p).pow(v))
}

/// Sorted distinct prime factors of `|n|` by trial division.
pub fn prime_factors(n: &BigInt) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Trial-division factorization of `|n|`; `n` must be nonzero and its
/// prime factors must fit in a `u64`.
pub fn factorize(n: &BigInt) -> Vec<(u64, u32)> {
    assert!(!n.is_zero(), "factorization of zero");
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    loop {
        let pb = BigInt::from(p);
        if &pb * &pb > n {
            break;
        }
        let mut e = 0;
        while n.is_multiple_of(&pb) {
            n /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        out.push((n.to_u64().expect("prime factor fits in u64"), 1));
    }
    out
}

pub fn is_squarefree(n: &BigInt) -> bool {
    !n.is_zero() && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    assert!(n.is_positive() && n.is_odd(), "jacobi needs odd positive modulus");
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        while a.is_even() {
            a /= 2;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    jacobi(a, &BigInt::from(p))
}

pub fn pow_u64(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}
