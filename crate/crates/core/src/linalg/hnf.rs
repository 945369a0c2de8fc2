//! Hermite and Smith normal forms over an integer scalar.
//!
//! Convention (row style): `H = U·M` is upper triangular in echelon form,
//! every pivot is positive, entries above a pivot lie in `[0, pivot)`, and
//! zero rows sit at the bottom. The Bruhat-Tits vertex representatives and
//! the canonical ideal bases rely on exactly this convention.

use num_rational::Ratio;

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::IntScalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnfDecomp<T> {
    pub hnf: Matrix<T>,
    pub transform: Matrix<T>,
    pub rank: usize,
}

/// Row operation `row[dst] += f · row[src]`.
fn add_row<T: IntScalar>(m: &mut Matrix<T>, dst: usize, src: usize, f: &T) {
    for c in 0..m.cols() {
        let v = m[(dst, c)].clone() + f.clone() * m[(src, c)].clone();
        m[(dst, c)] = v;
    }
}

fn negate_row<T: IntScalar>(m: &mut Matrix<T>, r: usize) {
    for c in 0..m.cols() {
        m[(r, c)] = -m[(r, c)].clone();
    }
}

/// Replaces rows `(r, s)` by `(x·r + y·s, u·r + v·s)`.
fn combine_rows<T: IntScalar>(m: &mut Matrix<T>, r: usize, s: usize, x: &T, y: &T, u: &T, v: &T) {
    for c in 0..m.cols() {
        let a = m[(r, c)].clone();
        let b = m[(s, c)].clone();
        m[(r, c)] = x.clone() * a.clone() + y.clone() * b.clone();
        m[(s, c)] = u.clone() * a + v.clone() * b;
    }
}

/// Hermite normal form of an arbitrary integer matrix, with the
/// unimodular transform. Never fails; use [`hnf_full_row_rank`] when the
/// caller needs independence of the rows.
pub fn hnf<T: IntScalar>(m: &Matrix<T>) -> HnfDecomp<T> {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = Matrix::<T>::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if h[(i, c)].is_zero() {
                continue;
            }
            let a = h[(r, c)].clone();
            let b = h[(i, c)].clone();
            let eg = a.extended_gcd(&b);
            let g = eg.gcd;
            let (x, y) = (eg.x, eg.y);
            let (ua, vb) = (-(b / g.clone()), a / g);
            combine_rows(&mut h, r, i, &x, &y, &ua, &vb);
            combine_rows(&mut u, r, i, &x, &y, &ua, &vb);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        let p = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&p);
            if !q.is_zero() {
                add_row(&mut h, i, r, &-q.clone());
                add_row(&mut u, i, r, &-q);
            }
        }
        r += 1;
    }
    HnfDecomp {
        hnf: h,
        transform: u,
        rank: r,
    }
}

/// HNF of a matrix that must have full row rank.
pub fn hnf_full_row_rank<T: IntScalar>(m: &Matrix<T>) -> Result<HnfDecomp<T>> {
    let d = hnf(m);
    if d.rank < m.rows() {
        return Err(Error::RankDeficient {
            rank: d.rank,
            needed: m.rows(),
        });
    }
    Ok(d)
}

/// Whether `m` already satisfies the HNF convention.
pub fn is_hnf<T: IntScalar>(m: &Matrix<T>) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero = false;
    for r in 0..m.rows() {
        let lead = (0..m.cols()).find(|&c| !m[(r, c)].is_zero());
        match lead {
            None => seen_zero = true,
            Some(c) => {
                if seen_zero || last_pivot.is_some_and(|p| c <= p) {
                    return false;
                }
                let p = &m[(r, c)];
                if !p.is_positive() {
                    return false;
                }
                for i in 0..r {
                    let e = &m[(i, c)];
                    if e.is_negative() || e >= p {
                        return false;
                    }
                }
                last_pivot = Some(c);
            }
        }
    }
    true
}

/// Basis (nonzero HNF rows) of the row lattice of `m`; the lattice must
/// have full rank `m.cols()`.
pub fn row_lattice_basis<T: IntScalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let d = hnf(m);
    if d.rank < m.cols() {
        return Err(Error::RankDeficient {
            rank: d.rank,
            needed: m.cols(),
        });
    }
    let idx: Vec<usize> = (0..d.rank).collect();
    Ok(d.hnf.select_rows(&idx))
}

/// Elementary divisors `e₁ | e₂ | …` of a square nonsingular matrix.
pub fn snf<T: IntScalar>(m: &Matrix<T>) -> Result<Vec<T>> {
    if !m.is_square() {
        return Err(Error::Dimension("Smith form needs a square matrix".into()));
    }
    if m.det()?.is_zero() {
        return Err(Error::Singular);
    }
    let n = m.rows();
    let mut a = m.clone();
    // alternate row and column Hermite reduction until diagonal
    loop {
        a = hnf(&a).hnf;
        a = hnf(&a.transpose()).hnf.transpose();
        let diagonal = (0..n).all(|r| (0..n).all(|c| r == c || a[(r, c)].is_zero()));
        if diagonal {
            break;
        }
    }
    let mut d: Vec<T> = (0..n).map(|i| a[(i, i)].abs()).collect();
    for i in 0..n {
        for j in i + 1..n {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    Ok(d)
}

/// Index `[L : M]` of the row lattice of `m` inside that of `l`.
pub fn lattice_index<T: IntScalar>(l: &Matrix<T>, m: &Matrix<T>) -> Result<T> {
    if !l.is_square() || !m.is_square() || l.rows() != m.rows() {
        return Err(Error::Dimension("lattice index needs two full-rank square bases".into()));
    }
    let dl = l.det()?;
    let dm = m.det()?;
    if dl.is_zero() || dm.is_zero() {
        return Err(Error::Singular);
    }
    // containment: every row of M has integral coordinates in L
    let coords = m.to_rational().mul(&l.to_rational().inverse()?)?;
    if !coords.is_integral() {
        return Err(Error::NotContained);
    }
    let q = Ratio::new(dm.abs(), dl.abs());
    debug_assert!(q.is_integer());
    Ok(q.to_integer())
}

/// `|det U| = 1`.
pub fn is_unimodular<T: IntScalar>(u: &Matrix<T>) -> bool {
    u.is_square() && u.det().map(|d| d.abs().is_one()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn m(rows: Vec<Vec<i64>>) -> Matrix<i64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_and_already_reduced() {
        let id = Matrix::<i64>::identity(4);
        let d = hnf(&id);
        assert_eq!(d.hnf, id);
        assert_eq!(d.transform, id);
        let a = m(vec![vec![2, 0], vec![0, 1]]);
        let d = hnf(&a);
        assert_eq!(d.hnf, a);
        assert_eq!(d.transform, Matrix::identity(2));
    }

    #[test]
    fn hnf_reconstructs_and_is_unimodular() {
        let a = m(vec![
            vec![3, 1, 4, 1],
            vec![5, 9, 2, 6],
            vec![5, 3, 5, 8],
            vec![9, 7, 9, 3],
        ]);
        let d = hnf(&a);
        assert!(is_hnf(&d.hnf));
        assert!(is_unimodular(&d.transform));
        assert_eq!(d.transform.mul(&a).unwrap(), d.hnf);
        assert_eq!(d.hnf.det().unwrap().abs(), a.det().unwrap().abs());
    }

    #[test]
    fn tall_generator_sets_reduce_to_a_basis() {
        let a = m(vec![vec![2, 0], vec![0, 2], vec![1, 1], vec![4, 6]]);
        let b = row_lattice_basis(&a).unwrap();
        assert_eq!(b, m(vec![vec![1, 1], vec![0, 2]]));
        let flat = m(vec![vec![1, 2], vec![2, 4]]);
        assert!(matches!(
            row_lattice_basis(&flat),
            Err(Error::RankDeficient { rank: 1, needed: 2 })
        ));
        assert!(hnf_full_row_rank(&flat).is_err());
    }

    #[test]
    fn smith_examples() {
        assert_eq!(snf(&m(vec![vec![1, 0], vec![0, 25]])).unwrap(), vec![1, 25]);
        assert_eq!(snf(&m(vec![vec![2, 1], vec![0, 2]])).unwrap(), vec![1, 4]);
        assert_eq!(snf(&Matrix::<i64>::identity(3)).unwrap(), vec![1, 1, 1]);
        assert_eq!(snf(&m(vec![vec![6, 0], vec![0, 4]])).unwrap(), vec![2, 12]);
        assert_eq!(snf(&m(vec![vec![1, 2], vec![2, 4]])), Err(Error::Singular));
    }

    #[test]
    fn index_examples() {
        let z4 = Matrix::<BigInt>::identity(4);
        let two = z4.scale(&BigInt::from(2));
        assert_eq!(lattice_index(&z4, &two).unwrap(), BigInt::from(16));
        let l = Matrix::<i64>::identity(2);
        assert_eq!(lattice_index(&l, &m(vec![vec![5, 0], vec![0, 1]])).unwrap(), 5);
        assert_eq!(
            lattice_index(&m(vec![vec![2, 0], vec![0, 1]]), &l),
            Err(Error::NotContained)
        );
    }
}
