//! Explicit isomorphisms `O ⊗ Z/ℓᵏ ≅ M₂(Z/ℓᵏ)` for primes `ℓ` where the
//! order is maximal and the algebra splits.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{is_prime, pow_u64, valuation};
use crate::error::{Error, Result};
use crate::linalg::{rank_mod_p, Matrix};
use crate::order::Order;
use crate::quaternion::Coords;
use crate::scalar::{inverse_mod, modulo};
use crate::Int;

/// 2×2 matrix over `Z/ℓᵏ`, entries reduced into `[0, ℓᵏ)`.
pub type Mat2 = [[Int; 2]; 2];

/// Largest prime for which roots are found by enumeration.
pub const MAX_SPLITTING_PRIME: u64 = 1 << 20;

const SAMPLE_ATTEMPTS: usize = 2000;

/// `x·y` in the basis of an order, from its structure constants, mod `q`.
pub fn residue_mul(table: &[Vec<Vec<Int>>], x: &[Int], y: &[Int], q: &Int) -> Vec<Int> {
    let mut out = vec![Int::zero(); 4];
    for (m, xm) in x.iter().enumerate() {
        if xm.is_zero() {
            continue;
        }
        for (n, yn) in y.iter().enumerate() {
            if yn.is_zero() {
                continue;
            }
            let c = xm * yn;
            for (o, t) in out.iter_mut().zip(&table[m][n]) {
                *o += &c * t;
            }
        }
    }
    out.iter().map(|v| modulo(v, q)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSplitting {
    ell: u64,
    precision: u32,
    modulus: Int,
    images: Vec<Mat2>,
}

impl LocalSplitting {
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> &Int {
        &self.modulus
    }

    /// Image of the `m`-th basis vector of the order.
    pub fn image(&self, m: usize) -> &Mat2 {
        &self.images[m]
    }

    /// Image of the element with the given integer coordinates.
    pub fn apply(&self, coords: &[Int]) -> Mat2 {
        let mut out: Mat2 = Default::default();
        for (c, img) in coords.iter().zip(&self.images) {
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += c * &img[i][j];
                }
            }
        }
        for row in out.iter_mut() {
            for v in row.iter_mut() {
                *v = modulo(v, &self.modulus);
            }
        }
        out
    }

    /// Image of an `ℓ`-integral element of `O ⊗ Q`.
    pub fn apply_element(&self, o: &Order, x: &Coords<Int>) -> Result<Mat2> {
        let c = o.coordinates(x)?;
        let mut ints = Vec::with_capacity(4);
        for v in c {
            let inv = inverse_mod(v.denom(), &self.modulus).ok_or(Error::NotContained)?;
            ints.push(modulo(&(v.numer() * inv), &self.modulus));
        }
        Ok(self.apply(&ints))
    }
}

pub fn mat2_mul(a: &Mat2, b: &Mat2, q: &Int) -> Mat2 {
    let mut out: Mat2 = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = modulo(&(&a[i][0] * &b[0][j] + &a[i][1] * &b[1][j]), q);
        }
    }
    out
}

/// Splitting modulo `ℓ`.
pub fn splitting_mod_l(o: &Order, ell: u64, seed: u64) -> Result<LocalSplitting> {
    local_splitting(o, ell, 1, seed)
}

/// Splitting modulo `ℓᵏ`. The idempotent found modulo `ℓ` depends only on
/// the seed, so splittings for different `k` agree after reduction.
pub fn local_splitting(o: &Order, ell: u64, k: u32, seed: u64) -> Result<LocalSplitting> {
    if !is_prime(ell) {
        return Err(Error::Precondition(format!("{ell} is not prime")));
    }
    if ell > MAX_SPLITTING_PRIME {
        return Err(Error::Resource(format!("prime {ell} is too large to split")));
    }
    if k == 0 {
        return Err(Error::Precondition("precision must be positive".into()));
    }
    if o.algebra().is_ramified_at(ell) {
        return Err(Error::Precondition(format!("the algebra is ramified at {ell}")));
    }
    if valuation(&o.reduced_discriminant()?, ell) != 0 {
        return Err(Error::Precondition(format!("the order is not maximal at {ell}")));
    }
    let p = Int::from(ell);
    let q = pow_u64(ell, k);
    let table = o.structure_constants();
    let one = o.one_in_basis();

    let e0 = find_idempotent(o, &one, ell, seed)?;
    let e = lift_idempotent(&table, e0, &q)?;

    // V = A·e, a free rank-2 module on which A acts from the left
    let cols: Vec<Vec<Int>> = (0..4)
        .map(|m| {
            let mut em = vec![Int::zero(); 4];
            em[m] = Int::one();
            residue_mul(&table, &em, &e, &q)
        })
        .collect();
    let (m1, m2) = (0..4)
        .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
        .find(|&(a, b)| {
            rank_mod_p(&Matrix::from_rows(vec![cols[a].clone(), cols[b].clone()]).expect("rows"), &p) == 2
        })
        .ok_or_else(|| Error::Internal("idempotent does not cut out a rank-2 module".into()))?;
    let v = [cols[m1].clone(), cols[m2].clone()];
    let (c1, c2) = (0..4)
        .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
        .find(|&(a, b)| !(&v[0][a] * &v[1][b] - &v[0][b] * &v[1][a]).is_multiple_of(&p))
        .expect("rank 2 vectors have a unit minor");
    let det = &v[0][c1] * &v[1][c2] - &v[0][c2] * &v[1][c1];
    let det_inv = inverse_mod(&modulo(&det, &q), &q).expect("unit minor");
    // coordinates (α, β) of w = α·v₁ + β·v₂
    let solve = |w: &[Int]| -> [Int; 2] {
        let alpha = modulo(&((&w[c1] * &v[1][c2] - &w[c2] * &v[1][c1]) * &det_inv), &q);
        let beta = modulo(&((&v[0][c1] * &w[c2] - &v[0][c2] * &w[c1]) * &det_inv), &q);
        [alpha, beta]
    };
    let images = (0..4)
        .map(|m| {
            let mut em = vec![Int::zero(); 4];
            em[m] = Int::one();
            let mut img: Mat2 = Default::default();
            for (j, vj) in v.iter().enumerate() {
                let [a, b] = solve(&residue_mul(&table, &em, vj, &q));
                img[0][j] = a;
                img[1][j] = b;
            }
            img
        })
        .collect();
    Ok(LocalSplitting { ell, precision: k, modulus: q, images })
}

fn find_idempotent(o: &Order, one: &[Int], ell: u64, seed: u64) -> Result<Vec<Int>> {
    let p = Int::from(ell);
    let alg = o.algebra();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ell.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let exhaustive = ell.checked_pow(4).filter(|&n| n <= SAMPLE_ATTEMPTS as u64);
    let attempts = exhaustive.unwrap_or(SAMPLE_ATTEMPTS as u64);
    let offset = rng.gen_range(0..attempts);
    for t in 0..attempts {
        let c: Vec<u64> = match exhaustive {
            Some(total) => {
                let t = (t + offset) % total;
                (0..4).map(|i| (t / ell.pow(i)) % ell).collect()
            }
            None => (0..4).map(|_| rng.gen_range(0..ell)).collect(),
        };
        let c: Vec<Int> = c.into_iter().map(Int::from).collect();
        let x = o.element(&c);
        let tr = modulo(&alg.trd_coords(&x).to_integer(), &p);
        let nr = modulo(&alg.nrd_coords(&x).to_integer(), &p);
        let roots: Vec<u64> = (0..ell)
            .filter(|&r| {
                let r = Int::from(r);
                (&r * &r - &tr * &r + &nr).is_multiple_of(&p)
            })
            .take(2)
            .collect();
        if let [r1, r2] = roots[..] {
            let (r1, r2) = (Int::from(r1), Int::from(r2));
            let inv = inverse_mod(&modulo(&(&r1 - &r2), &p), &p).expect("distinct roots");
            let e = c
                .iter()
                .zip(one)
                .map(|(ci, oi)| modulo(&((ci - &r2 * oi) * &inv), &p))
                .collect();
            return Ok(e);
        }
    }
    Err(Error::Internal(format!("no split element found modulo {ell}")))
}

fn lift_idempotent(table: &[Vec<Vec<Int>>], mut e: Vec<Int>, q: &Int) -> Result<Vec<Int>> {
    let bits = q.bits().to_u32().unwrap_or(u32::MAX);
    for _ in 0..=bits + 1 {
        let e2 = residue_mul(table, &e, &e, q);
        if e2 == e {
            return Ok(e);
        }
        let e3 = residue_mul(table, &e2, &e, q);
        e = e2
            .iter()
            .zip(&e3)
            .map(|(a, b)| modulo(&(Int::from(3) * a - Int::from(2) * b), q))
            .collect();
    }
    Err(Error::Internal("idempotent lifting did not converge".into()))
}
