//! The quaternion algebra `(a, b | Q)` with basis `1, i, j, k`, where
//! `i² = a`, `j² = b`, `ij = -ji = k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::arith::{is_prime, legendre, prime_factors, split_valuation};
use crate::error::{Error, Result};
use crate::scalar::IntScalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuaternionAlgebra<T: IntScalar> {
    a: Ratio<T>,
    b: Ratio<T>,
}

/// Coordinates in the basis `1, i, j, k`.
pub type Coords<T> = [Ratio<T>; 4];

impl<T: IntScalar> QuaternionAlgebra<T> {
    pub fn new(a: Ratio<T>, b: Ratio<T>) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::Precondition(
                "structure constants of a quaternion algebra must be nonzero".into(),
            ));
        }
        Ok(QuaternionAlgebra { a, b })
    }

    pub fn a(&self) -> &Ratio<T> {
        &self.a
    }

    pub fn b(&self) -> &Ratio<T> {
        &self.b
    }

    /// Product of coordinate vectors.
    pub fn mul_coords(&self, x: &Coords<T>, y: &Coords<T>) -> Coords<T> {
        let a = &self.a;
        let b = &self.b;
        let ab = a.clone() * b.clone();
        let [x0, x1, x2, x3] = x.clone();
        let [y0, y1, y2, y3] = y.clone();
        [
            x0.clone() * y0.clone() + a.clone() * x1.clone() * y1.clone()
                + b.clone() * x2.clone() * y2.clone()
                - ab * x3.clone() * y3.clone(),
            x0.clone() * y1.clone() + x1.clone() * y0.clone() - b.clone() * x2.clone() * y3.clone()
                + b.clone() * x3.clone() * y2.clone(),
            x0.clone() * y2.clone() + x2.clone() * y0.clone() + a.clone() * x1.clone() * y3.clone()
                - a.clone() * x3.clone() * y1.clone(),
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ]
    }

    pub fn conj_coords(&self, x: &Coords<T>) -> Coords<T> {
        [
            x[0].clone(),
            -x[1].clone(),
            -x[2].clone(),
            -x[3].clone(),
        ]
    }

    pub fn trd_coords(&self, x: &Coords<T>) -> Ratio<T> {
        x[0].clone() + x[0].clone()
    }

    /// `x₀² − a x₁² − b x₂² + ab x₃²`.
    pub fn nrd_coords(&self, x: &Coords<T>) -> Ratio<T> {
        let ab = self.a.clone() * self.b.clone();
        x[0].clone() * x[0].clone()
            - self.a.clone() * x[1].clone() * x[1].clone()
            - self.b.clone() * x[2].clone() * x[2].clone()
            + ab * x[3].clone() * x[3].clone()
    }

    pub fn inverse_coords(&self, x: &Coords<T>) -> Result<Coords<T>> {
        let n = self.nrd_coords(x);
        if n.is_zero() {
            return Err(Error::Singular);
        }
        Ok(self.conj_coords(x).map(|c| c / n.clone()))
    }

    /// Indefinite iff `z² = ax² + by²` is isotropic over the reals.
    pub fn is_indefinite(&self) -> bool {
        self.a.is_positive() || self.b.is_positive()
    }
}

/// An element of a quaternion algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatElement<T: IntScalar> {
    algebra: Arc<QuaternionAlgebra<T>>,
    coords: Coords<T>,
}

impl<T: IntScalar> QuatElement<T> {
    pub fn new(algebra: Arc<QuaternionAlgebra<T>>, coords: Coords<T>) -> Self {
        QuatElement { algebra, coords }
    }

    pub fn from_ints(algebra: Arc<QuaternionAlgebra<T>>, c: [i64; 4]) -> Self {
        let coords = c.map(|x| Ratio::from_integer(T::of_i64(x)));
        QuatElement { algebra, coords }
    }

    pub fn one(algebra: Arc<QuaternionAlgebra<T>>) -> Self {
        Self::from_ints(algebra, [1, 0, 0, 0])
    }

    pub fn algebra(&self) -> &Arc<QuaternionAlgebra<T>> {
        &self.algebra
    }

    pub fn coords(&self) -> &Coords<T> {
        &self.coords
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(QuatElement {
            algebra: self.algebra.clone(),
            coords: self.algebra.mul_coords(&self.coords, &other.coords),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut coords = self.coords.clone();
        for (c, o) in coords.iter_mut().zip(other.coords.iter()) {
            *c = c.clone() + o.clone();
        }
        Ok(QuatElement {
            algebra: self.algebra.clone(),
            coords,
        })
    }

    pub fn conj(&self) -> Self {
        QuatElement {
            algebra: self.algebra.clone(),
            coords: self.algebra.conj_coords(&self.coords),
        }
    }

    pub fn trd(&self) -> Ratio<T> {
        self.algebra.trd_coords(&self.coords)
    }

    pub fn nrd(&self) -> Ratio<T> {
        self.algebra.nrd_coords(&self.coords)
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(QuatElement {
            algebra: self.algebra.clone(),
            coords: self.algebra.inverse_coords(&self.coords)?,
        })
    }

    pub fn scale(&self, s: &Ratio<T>) -> Self {
        QuatElement {
            algebra: self.algebra.clone(),
            coords: self.coords.clone().map(|c| c * s.clone()),
        }
    }
}

/// Panics on algebra mismatch; use [`QuatElement::try_mul`] to get an error.
impl<T: IntScalar> Mul for &QuatElement<T> {
    type Output = QuatElement<T>;
    fn mul(self, rhs: Self) -> QuatElement<T> {
        self.try_mul(rhs).expect("quaternion algebra mismatch")
    }
}

impl<T: IntScalar> Add for &QuatElement<T> {
    type Output = QuatElement<T>;
    fn add(self, rhs: Self) -> QuatElement<T> {
        self.try_add(rhs).expect("quaternion algebra mismatch")
    }
}

impl<T: IntScalar> Neg for &QuatElement<T> {
    type Output = QuatElement<T>;
    fn neg(self) -> QuatElement<T> {
        self.scale(&-Ratio::one())
    }
}

impl<T: IntScalar> Sub for &QuatElement<T> {
    type Output = QuatElement<T>;
    fn sub(self, rhs: Self) -> QuatElement<T> {
        self + &(-rhs)
    }
}

impl<T: IntScalar> fmt::Display for QuatElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "i", "j", "k"];
        let mut first = true;
        for (c, n) in self.coords.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if n.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{n}")?;
            } else {
                write!(f, "({c}){n}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A place of `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinite => write!(f, "inf"),
        }
    }
}

/// Integer in the same square class as `r` (`num · den`).
fn square_class_integer(r: &BigRational) -> BigInt {
    r.numer() * r.denom()
}

/// Hilbert symbol `(a, b)_v` by the local closed forms: Legendre symbols at
/// odd primes, the `ε`/`ω` unit formula at 2, signs at infinity.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, v: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Precondition("Hilbert symbol of zero".into()));
    }
    let a = square_class_integer(a);
    let b = square_class_integer(b);
    match v {
        Place::Infinite => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Finite(p) if !is_prime(p) => Err(Error::InvalidPlace(format!("{p} is not prime"))),
        Place::Finite(2) => Ok(hilbert_at_two(&a, &b)),
        Place::Finite(p) => Ok(hilbert_at_odd(&a, &b, p)),
    }
}

fn hilbert_at_odd(a: &BigInt, b: &BigInt, p: u64) -> i8 {
    let (alpha, u) = split_valuation(a, p);
    let (beta, v) = split_valuation(b, p);
    let mut s: i32 = 1;
    // (−1)^{αβε(p)}
    if (alpha * beta) % 2 == 1 && (p % 4) == 3 {
        s = -s;
    }
    if beta % 2 == 1 {
        s *= legendre(&u, p);
    }
    if alpha % 2 == 1 {
        s *= legendre(&v, p);
    }
    s as i8
}

fn hilbert_at_two(a: &BigInt, b: &BigInt) -> i8 {
    let (alpha, u) = split_valuation(a, 2);
    let (beta, v) = split_valuation(b, 2);
    let eps = |x: &BigInt| -> u32 {
        // (x − 1)/2 mod 2
        if x.mod_floor(&BigInt::from(4)) == BigInt::one() {
            0
        } else {
            1
        }
    };
    let omega = |x: &BigInt| -> u32 {
        // (x² − 1)/8 mod 2
        let r = x.mod_floor(&BigInt::from(8));
        if r == BigInt::from(1) || r == BigInt::from(7) {
            0
        } else {
            1
        }
    };
    let e = eps(&u) * eps(&v) + alpha * omega(&v) + beta * omega(&u);
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

impl QuaternionAlgebra<BigInt> {
    pub fn from_ints(a: i64, b: i64) -> Result<Self> {
        Self::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()))
    }

    /// Primes where the only possible ramification can occur: the primes
    /// dividing `2 · num(a) · den(a) · num(b) · den(b)`.
    pub fn candidate_primes(&self) -> Vec<u64> {
        let prod = BigInt::from(2) * self.a.numer() * self.a.denom() * self.b.numer() * self.b.denom();
        prime_factors(&prod)
    }

    /// Finite ramified places, sorted.
    pub fn ramified_primes(&self) -> Vec<u64> {
        self.candidate_primes()
            .into_iter()
            .filter(|&p| hilbert_symbol(&self.a, &self.b, Place::Finite(p)) == Ok(-1))
            .collect()
    }

    /// All ramified places including infinity when the algebra is definite.
    pub fn ramified_places(&self) -> Vec<Place> {
        let mut out: Vec<Place> = self.ramified_primes().into_iter().map(Place::Finite).collect();
        if !self.is_indefinite() {
            out.push(Place::Infinite);
        }
        out
    }

    /// Product of the finite ramified primes.
    pub fn discriminant(&self) -> BigInt {
        self.ramified_primes()
            .into_iter()
            .fold(BigInt::one(), |acc, p| acc * BigInt::from(p))
    }

    pub fn is_ramified_at(&self, p: u64) -> bool {
        hilbert_symbol(&self.a, &self.b, Place::Finite(p)) == Ok(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(a: i64, b: i64) -> Arc<QuaternionAlgebra<BigInt>> {
        Arc::new(QuaternionAlgebra::from_ints(a, b).unwrap())
    }

    #[test]
    fn defining_relations() {
        let b = alg(-1, 3);
        let i = QuatElement::from_ints(b.clone(), [0, 1, 0, 0]);
        let j = QuatElement::from_ints(b.clone(), [0, 0, 1, 0]);
        let k = QuatElement::from_ints(b.clone(), [0, 0, 0, 1]);
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &i, -&k);
        assert_eq!(&i * &i, QuatElement::from_ints(b.clone(), [-1, 0, 0, 0]));
        assert_eq!(&k * &k, QuatElement::from_ints(b.clone(), [3, 0, 0, 0]));
        let one = QuatElement::one(b.clone());
        let x = &one + &i;
        let y = &one - &i;
        // (1+i)(1−i) = 1 − a
        assert_eq!(&x * &y, QuatElement::from_ints(b, [2, 0, 0, 0]));
    }

    #[test]
    fn norms_in_minus_one_three() {
        let b = alg(-1, 3);
        assert_eq!(QuatElement::one(b.clone()).nrd(), BigRational::one());
        assert_eq!(QuatElement::from_ints(b.clone(), [0, 1, 0, 0]).nrd(), BigRational::from_integer(1.into()));
        assert_eq!(QuatElement::from_ints(b, [0, 0, 1, 0]).nrd(), BigRational::from_integer((-3).into()));
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let x = QuatElement::one(alg(-1, 3));
        let y = QuatElement::one(alg(-1, 11));
        assert_eq!(x.try_mul(&y), Err(Error::AlgebraMismatch));
    }

    #[test]
    fn symbols_and_discriminants() {
        let q = |a: i64| BigRational::from_integer(a.into());
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Infinite), Ok(-1));
        assert_eq!(hilbert_symbol(&q(-1), &q(3), Place::Finite(3)), Ok(-1));
        assert_eq!(hilbert_symbol(&q(-1), &q(3), Place::Finite(2)), Ok(-1));
        assert!(matches!(hilbert_symbol(&q(2), &q(3), Place::Finite(4)), Err(Error::InvalidPlace(_))));
        for p in [2u64, 3, 5, 7, 11] {
            assert_eq!(hilbert_symbol(&q(1), &q(7), Place::Finite(p)), Ok(1));
        }
        assert_eq!(alg(-1, 3).ramified_primes(), vec![2, 3]);
        assert_eq!(alg(-1, 3).discriminant(), BigInt::from(6));
        assert_eq!(alg(1, 1).discriminant(), BigInt::from(1));
        assert_eq!(alg(-1, 11).ramified_primes(), vec![2, 11]);
        assert!(alg(-1, 3).is_indefinite());
        assert!(!alg(-1, -1).is_indefinite());
        assert_eq!(alg(-1, -1).ramified_places(), vec![Place::Finite(2), Place::Infinite]);
    }

    #[test]
    fn rational_entries_use_square_class() {
        let a = BigRational::new((-1).into(), 4.into());
        let b = BigRational::new(3.into(), 1.into());
        let alg = QuaternionAlgebra::new(a, b).unwrap();
        assert_eq!(alg.discriminant(), BigInt::from(6));
    }
}
