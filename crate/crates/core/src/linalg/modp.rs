//! Linear algebra over the prime field `F_p`, with entries carried as the
//! integer scalar reduced into `[0, p)`.


use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{inverse_mod, modulo, IntScalar};

fn is_prime_scalar<T: IntScalar>(p: &T) -> bool {
    let two = T::of_u64(2);
    if *p < two {
        return false;
    }
    let mut d = two;
    while d.clone() * d.clone() <= *p {
        if p.is_multiple_of(&d) {
            return false;
        }
        d = d + T::one();
    }
    true
}

/// Reduced row echelon form mod `p`. Returns the reduced matrix and the
/// pivot columns.
pub fn rref_mod_p<T: IntScalar>(m: &Matrix<T>, p: &T) -> (Matrix<T>, Vec<usize>) {
    let mut a = m.map(|x| modulo(x, p));
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let Some(piv) = (r..a.rows()).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, piv);
        let inv = inverse_mod(&a[(r, c)], p).expect("nonzero residue is invertible mod a prime");
        for k in 0..a.cols() {
            a[(r, k)] = modulo(&(a[(r, k)].clone() * inv.clone()), p);
        }
        for i in 0..a.rows() {
            if i != r && !a[(i, c)].is_zero() {
                let f = a[(i, c)].clone();
                for k in 0..a.cols() {
                    let v = a[(i, k)].clone() - f.clone() * a[(r, k)].clone();
                    a[(i, k)] = modulo(&v, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank_mod_p<T: IntScalar>(m: &Matrix<T>, p: &T) -> usize {
    rref_mod_p(m, p).1.len()
}

/// Basis of `{v : M·v ≡ 0 (mod p)}`, one vector per row of the result.
pub fn kernel_mod_p<T: IntScalar>(m: &Matrix<T>, p: &T) -> Result<Matrix<T>> {
    if !is_prime_scalar(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let n = m.cols();
    let (a, pivots) = rref_mod_p(m, p);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![T::zero(); n];
        v[f] = T::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = modulo(&-a[(r, f)].clone(), p);
        }
        basis.push(v);
    }
    if basis.is_empty() {
        return Ok(Matrix::zeros(0, n));
    }
    Matrix::from_rows(basis)
}

/// Row-space basis mod `p` (nonzero rows of the RREF).
pub fn row_space_mod_p<T: IntScalar>(m: &Matrix<T>, p: &T) -> Matrix<T> {
    let (a, pivots) = rref_mod_p(m, p);
    let idx: Vec<usize> = (0..pivots.len()).collect();
    a.select_rows(&idx)
}
