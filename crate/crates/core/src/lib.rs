//! Exact arithmetic for rational quaternion algebras, Eichler orders and
//! their left ideals, Bruhat-Tits trees, and the Atkin-Lehner descent that
//! attaches a squarefree Shimura-curve level to a Galois-stable
//! configuration of QM abelian surfaces.
//!
//! The linear algebra in [`linalg`] and the element arithmetic in
//! [`quaternion`] are generic over an integer scalar ([`IntScalar`]); the
//! aliases below fix the arbitrary precision instantiation used by the
//! orders, trees and the descent machinery.

pub mod arith;
pub mod bruhat_tits;
pub mod center;
pub mod descent;
pub mod error;
pub mod ideal;
pub mod io;
pub mod isogeny;
pub mod linalg;
pub mod order;
pub mod quaternion;
pub mod scalar;
pub mod splitting;

pub use error::{Error, Result};
pub use scalar::IntScalar;

/// Arbitrary precision integer.
pub type Int = num_bigint::BigInt;
/// Arbitrary precision rational.
pub type Rat = num_rational::BigRational;
pub type IntMatrix = linalg::Matrix<Int>;
pub type RatMatrix = linalg::Matrix<Rat>;
pub type RatLattice = linalg::Lattice<Int>;
pub type Algebra = quaternion::QuaternionAlgebra<Int>;
pub type Quaternion = quaternion::QuatElement<Int>;
