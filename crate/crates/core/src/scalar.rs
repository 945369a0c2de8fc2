//! Scalar bounds shared by the exact linear algebra.
//!
//! Everything in [`crate::linalg`] is generic over an integer ring `T`
//! (rationals are `Ratio<T>`). The rest of the crate instantiates it with
//! arbitrary precision integers through the aliases in the crate root;
//! machine integers such as `i64` also satisfy the bound and are handy in
//! tests.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// An exact integer scalar.
pub trait IntScalar:
    Integer + Signed + Clone + Debug + Display + Hash + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn of_u64(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("integer scalar too narrow")
    }

    fn of_i64(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("integer scalar too narrow")
    }
}

impl<T> IntScalar for T where
    T: Integer + Signed + Clone + Debug + Display + Hash + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

/// Exact rational over `T`.
pub type RatOf<T> = Ratio<T>;

/// Least common multiple of the denominators.
pub fn common_denominator<'a, T: IntScalar>(values: impl IntoIterator<Item = &'a Ratio<T>>) -> T {
    values
        .into_iter()
        .fold(T::one(), |acc, r| acc.lcm(r.denom()))
}

/// Floor-mod with a positive modulus.
pub fn modulo<T: IntScalar>(a: &T, m: &T) -> T {
    a.mod_floor(m)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inverse_mod<T: IntScalar>(a: &T, m: &T) -> Option<T> {
    let eg = a.mod_floor(m).extended_gcd(m);
    if eg.gcd.is_one() {
        Some(eg.x.mod_floor(m))
    } else {
        None
    }
}
