use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use super::hnf::{hnf, row_lattice_basis};
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{common_denominator, IntScalar};

/// A full-rank lattice in `Q^n`, stored through its canonical basis
/// `H / d`: `H` the integral HNF, `d > 0` minimal. Two lattices are equal
/// iff their canonical bases are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice<T: IntScalar> {
    basis: Matrix<Ratio<T>>,
}

impl<T: IntScalar> Lattice<T> {
    /// Lattice spanned by the rows of `gens`, which must have rank `n`.
    pub fn from_generators(gens: &Matrix<Ratio<T>>) -> Result<Self> {
        let d = common_denominator(gens.entries().iter());
        let int = gens.map(|x| (x.clone() * Ratio::from_integer(d.clone())).to_integer());
        let h = row_lattice_basis(&int)?;
        let g = h.content().gcd(&d);
        let basis = h.map(|x| Ratio::new(x.clone() / g.clone(), d.clone() / g.clone()));
        Ok(Lattice { basis })
    }

    pub fn from_rows(rows: Vec<Vec<Ratio<T>>>) -> Result<Self> {
        Self::from_generators(&Matrix::from_rows(rows)?)
    }

    pub fn standard(n: usize) -> Self {
        Lattice {
            basis: Matrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<Ratio<T>> {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Ratio<T>>> {
        self.basis.to_rows()
    }

    /// Coordinates of `v` in the canonical basis.
    pub fn coordinates(&self, v: &[Ratio<T>]) -> Result<Vec<Ratio<T>>> {
        self.basis.solve_left(v)
    }

    pub fn contains(&self, v: &[Ratio<T>]) -> bool {
        self.coordinates(v)
            .map(|c| c.iter().all(Ratio::is_integer))
            .unwrap_or(false)
    }

    pub fn contains_lattice(&self, other: &Self) -> bool {
        match other.basis.mul(&self.basis.inverse().expect("lattice basis is invertible")) {
            Ok(m) => m.is_integral(),
            Err(_) => false,
        }
    }

    /// Covolume `|det basis|`.
    pub fn covolume(&self) -> Ratio<T> {
        self.basis.rat_det().expect("square basis").abs()
    }

    /// `[self : sub]`, requiring `sub ⊆ self`.
    pub fn index_of(&self, sub: &Self) -> Result<T> {
        if !self.contains_lattice(sub) {
            return Err(Error::NotContained);
        }
        let q = sub.covolume() / self.covolume();
        if !q.is_integer() {
            return Err(Error::Internal("non-integral index of a sublattice".into()));
        }
        Ok(q.to_integer())
    }

    pub fn scale(&self, s: &Ratio<T>) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::Singular);
        }
        Self::from_generators(&self.basis.scale(s))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        Self::from_generators(&self.basis.vstack(&other.basis)?)
    }

    /// Dual lattice under the standard dot product.
    pub fn dual(&self) -> Self {
        let inv = self.basis.inverse().expect("lattice basis is invertible");
        Self::from_generators(&inv.transpose()).expect("dual of a full-rank lattice")
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        Ok(self.dual().sum(&other.dual())?.dual())
    }

    /// Integer coordinate matrix of `self` relative to `reference`, in the
    /// HNF convention; this is the canonical description of a sublattice.
    pub fn relative_hnf(&self, reference: &Self) -> Result<Matrix<T>> {
        let coords = self.basis.mul(&reference.basis.inverse()?)?;
        if !coords.is_integral() {
            return Err(Error::NotContained);
        }
        Ok(hnf(&coords.map(|x| x.to_integer())).hnf)
    }

    /// Largest positive integer `k` with `self ⊆ k·reference`.
    pub fn content_in(&self, reference: &Self) -> Result<T> {
        Ok(self.relative_hnf(reference)?.content().abs())
    }

    /// Lattice from integer coordinates relative to `reference`.
    pub fn from_relative(coords: &Matrix<T>, reference: &Self) -> Result<Self> {
        Self::from_generators(&coords.to_rational().mul(&reference.basis)?)
    }
}

impl<T: IntScalar> Lattice<T> {
    pub fn is_integral(&self) -> bool {
        self.basis.is_integral()
    }

    pub fn one_vector(n: usize) -> Vec<Ratio<T>> {
        let mut v = vec![Ratio::zero(); n];
        v[0] = Ratio::one();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn canonical_basis_ignores_generator_choice() {
        let a = Lattice::from_rows(vec![vec![r(1, 2), r(0, 1)], vec![r(0, 1), r(1, 1)]]).unwrap();
        let b = Lattice::from_rows(vec![
            vec![r(1, 2), r(1, 1)],
            vec![r(1, 1), r(3, 1)],
            vec![r(0, 1), r(2, 1)],
        ])
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.covolume(), r(1, 2));
    }

    #[test]
    fn intersection_and_index() {
        let z2 = Lattice::<i64>::standard(2);
        let a = Lattice::from_rows(vec![vec![r(2, 1), r(0, 1)], vec![r(0, 1), r(1, 1)]]).unwrap();
        let b = Lattice::from_rows(vec![vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(3, 1)]]).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(z2.index_of(&c).unwrap(), 6);
        assert!(a.contains_lattice(&c) && b.contains_lattice(&c));
        assert_eq!(a.index_of(&z2), Err(Error::NotContained));
    }
}
