//! Integral left ideals of an order.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime, valuation};
use crate::error::{Error, Result};
use crate::linalg::{kernel_mod_p, row_space_mod_p, Matrix};
use crate::order::{product_lattice, right_order_of, Order};
use crate::splitting::splitting_mod_l;
use crate::{Int, IntMatrix, RatLattice};

/// Default bound on `n` for [`enumerate_left_ideals_bruteforce`].
pub const MAX_ORACLE_NORM: u64 = 13;

/// Largest `ℓ` for which ideals at `ℓ | N` are found by scanning `O/ℓO`.
pub const MAX_LEVEL_PRIME_SCAN: u64 = 60;

/// An integral left ideal `I ⊆ O`. Ideals compare by their HNF in
/// coordinates of the order basis.
#[derive(Clone, Debug)]
pub struct LeftIdeal {
    order: Arc<Order>,
    lattice: RatLattice,
    coords: IntMatrix,
}

impl LeftIdeal {
    /// Checks `O·I ⊆ I` and `I ⊆ O`.
    pub fn new(order: Arc<Order>, lattice: RatLattice) -> Result<Self> {
        let coords = lattice.relative_hnf(order.lattice())?;
        let alg = order.algebra();
        for x in order.basis_coords() {
            for y in lattice.basis_rows() {
                let p = alg.mul_coords(&x, &crate::order::to_coords(&y));
                if !lattice.contains(&p) {
                    return Err(Error::InvariantViolation(
                        "lattice is not stable under left multiplication by the order".into(),
                    ));
                }
            }
        }
        Ok(LeftIdeal { order, lattice, coords })
    }

    /// Ideal from integer coordinates relative to the order basis.
    pub fn from_order_coords(order: Arc<Order>, coords: &IntMatrix) -> Result<Self> {
        let lattice = RatLattice::from_relative(coords, order.lattice())?;
        Self::new(order, lattice)
    }

    pub fn unit(order: Arc<Order>) -> Self {
        let lattice = order.lattice().clone();
        let coords = IntMatrix::identity(4);
        LeftIdeal { order, lattice, coords }
    }

    /// `k·O`.
    pub fn scalar(order: Arc<Order>, k: &Int) -> Result<Self> {
        if k.is_zero() {
            return Err(Error::Singular);
        }
        let lattice = order.scaled(k);
        Self::new(order, lattice)
    }

    pub fn order(&self) -> &Arc<Order> {
        &self.order
    }

    pub fn lattice(&self) -> &RatLattice {
        &self.lattice
    }

    /// Canonical HNF in the coordinates of the order basis.
    pub fn order_coords(&self) -> &IntMatrix {
        &self.coords
    }

    /// `[O : I]`.
    pub fn index(&self) -> Int {
        self.coords.det().expect("square").abs()
    }

    pub fn norm(&self) -> Result<Int> {
        ideal_norm(self)
    }

    pub fn is_primitive(&self) -> bool {
        self.coords.content().is_one()
    }

    /// Largest `k` with `I ⊆ kO`.
    pub fn content(&self) -> Int {
        self.coords.content()
    }

    /// `I / content(I)`.
    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_one() {
            return self.clone();
        }
        let coords = self.coords.map(|x| x / &c);
        Self::from_order_coords(self.order.clone(), &coords).expect("scaled ideal")
    }

    pub fn right_order(&self) -> Result<Order> {
        right_order(self)
    }

    pub fn basis_coords(&self) -> Vec<crate::quaternion::Coords<Int>> {
        self.lattice
            .basis_rows()
            .iter()
            .map(|r| crate::order::to_coords(r))
            .collect()
    }

    /// Hex digest of the canonical HNF, for labels.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let h = Sha256::digest(self.coords.to_string().as_bytes());
        h.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }
}

impl PartialEq for LeftIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.order.lattice() == other.order.lattice()
    }
}

impl Eq for LeftIdeal {}

impl PartialOrd for LeftIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LeftIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords
            .cmp(&other.coords)
            .then_with(|| self.order.lattice().cmp(other.order.lattice()))
    }
}

impl fmt::Display for LeftIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lattice.basis())
    }
}

/// `√[O : I]`.
pub fn ideal_norm(i: &LeftIdeal) -> Result<Int> {
    let idx = i.index();
    let n = idx.sqrt();
    if &n * &n != idx {
        return Err(Error::InvariantViolation(format!("index {idx} is not a perfect square")));
    }
    Ok(n)
}

pub fn right_order(i: &LeftIdeal) -> Result<Order> {
    Order::new(i.order.algebra().clone(), right_order_of(i.order.algebra(), &i.lattice)?)
}

/// Lattice spanned by products of basis elements.
pub fn ideal_product(i: &RatLattice, j: &RatLattice, order: &Order) -> Result<RatLattice> {
    product_lattice(order.algebra(), i, j)
}

/// `I·J` for `J` a left ideal of the right order of `I`, as a left ideal
/// of the left order of `I`.
pub fn compose(i: &LeftIdeal, j: &LeftIdeal) -> Result<LeftIdeal> {
    let lat = product_lattice(i.order.algebra(), &i.lattice, &j.lattice)?;
    LeftIdeal::new(i.order.clone(), lat)
}

/// The two-sided ideal of norm `ℓ` at a ramified prime: the radical of the
/// trace pairing modulo `ℓ`.
pub fn two_sided_ideal(o: &Arc<Order>, ell: u64) -> Result<LeftIdeal> {
    if !is_prime(ell) || !o.algebra().is_ramified_at(ell) {
        return Err(Error::Precondition(format!(
            "{ell} does not divide the discriminant {}",
            o.algebra().discriminant()
        )));
    }
    if valuation(&o.reduced_discriminant()?, ell) != 1 {
        return Err(Error::Precondition(format!("the order is not maximal at {ell}")));
    }
    let rad = o.trace_radical(ell)?;
    let p = LeftIdeal::new(o.clone(), rad)?;
    if ideal_norm(&p)? != Int::from(ell) {
        return Err(Error::Internal(format!("radical at {ell} has the wrong norm")));
    }
    Ok(p)
}

/// All left ideals of norm `ℓ`, canonicalized and sorted.
pub fn left_ideals_of_norm_l(o: &Arc<Order>, ell: u64, seed: u64) -> Result<Vec<LeftIdeal>> {
    if !is_prime(ell) {
        return Err(Error::Precondition(format!("{ell} is not prime")));
    }
    let disc = o.reduced_discriminant()?;
    let v = valuation(&disc, ell);
    let mut out = match v {
        0 => ideals_from_projective_line(o, ell, seed)?,
        1 if o.algebra().is_ramified_at(ell) => vec![two_sided_ideal(o, ell)?],
        1 => principal_ideals_mod_l(o, ell)?,
        _ => {
            return Err(Error::Precondition(format!(
                "the order is not hereditary at {ell} (discriminant {disc})"
            )))
        }
    };
    out.sort();
    out.dedup();
    Ok(out)
}

/// `I_w = {x ∈ O : θ(x)·w ≡ 0 mod ℓ}` for the `ℓ + 1` lines `w`.
fn ideals_from_projective_line(o: &Arc<Order>, ell: u64, seed: u64) -> Result<Vec<LeftIdeal>> {
    let theta = splitting_mod_l(o, ell, seed)?;
    let p = Int::from(ell);
    let mut lines: Vec<[Int; 2]> = (0..ell).map(|t| [Int::one(), Int::from(t)]).collect();
    lines.push([Int::zero(), Int::one()]);
    lines
        .into_iter()
        .map(|w| {
            let cond = Matrix::from_fn(2, 4, |r, m| {
                let img = theta.image(m);
                &img[r][0] * &w[0] + &img[r][1] * &w[1]
            });
            ideal_from_kernel(o, &kernel_mod_p(&cond, &p)?, &p)
        })
        .collect()
}

fn ideal_from_kernel(o: &Arc<Order>, ker: &IntMatrix, p: &Int) -> Result<LeftIdeal> {
    let gens = ker.vstack(&IntMatrix::identity(4).scale(p))?;
    let coords = crate::linalg::row_lattice_basis(&gens)?;
    LeftIdeal::from_order_coords(o.clone(), &coords)
}

/// At `ℓ || N` every norm-`ℓ` ideal is `O·y + ℓO`; scan `y ∈ O/ℓO`.
fn principal_ideals_mod_l(o: &Arc<Order>, ell: u64) -> Result<Vec<LeftIdeal>> {
    if ell > MAX_LEVEL_PRIME_SCAN {
        return Err(Error::Resource(format!(
            "scanning O/{ell}O for ideals exceeds the limit {MAX_LEVEL_PRIME_SCAN}"
        )));
    }
    let p = Int::from(ell);
    let table = o.structure_constants();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for code in 1..ell.pow(4) {
        let y: Vec<Int> = (0..4).map(|i| Int::from((code / ell.pow(i)) % ell)).collect();
        let rows: Vec<Vec<Int>> = (0..4)
            .map(|m| {
                let mut em = vec![Int::zero(); 4];
                em[m] = Int::one();
                crate::splitting::residue_mul(&table, &em, &y, &p)
            })
            .collect();
        let span = row_space_mod_p(&Matrix::from_rows(rows)?, &p);
        if span.rows() != 2 || !seen.insert(span.clone()) {
            continue;
        }
        out.push(ideal_from_kernel(o, &span, &p)?);
    }
    Ok(out)
}

/// Visits every HNF basis (order coordinates) of a sublattice `L` with
/// `n·Zⁿ ⊆ L ⊆ Zⁿ` and `[Zⁿ : L] = index`, in dimension 4.
pub fn sublattices_containing(n: u64, index: u64, mut visit: impl FnMut(&[[i64; 4]; 4])) {
    let mut h = [[0i64; 4]; 4];
    fill_row(3, n as i64, index as i64, &mut h, &mut visit);
}

fn fill_row(i: usize, n: i64, remaining: i64, h: &mut [[i64; 4]; 4], visit: &mut impl FnMut(&[[i64; 4]; 4])) {
    for d in 1..=n {
        if n % d != 0 || remaining % d != 0 {
            continue;
        }
        if i == 0 && d != remaining {
            continue;
        }
        for x in h[i].iter_mut() {
            *x = 0;
        }
        h[i][i] = d;
        fill_offdiag(i, i + 1, n, remaining / d, h, visit);
    }
}

fn fill_offdiag(
    i: usize,
    j: usize,
    n: i64,
    remaining: i64,
    h: &mut [[i64; 4]; 4],
    visit: &mut impl FnMut(&[[i64; 4]; 4]),
) {
    if j == 4 {
        // n·eᵢ ∈ L iff (n/dᵢ)·rowᵢ − n·eᵢ lies in the span of the lower rows
        let k = n / h[i][i];
        let mut w = [0i64; 4];
        for c in i + 1..4 {
            w[c] = k * h[i][c];
        }
        if !in_triangular(h, i + 1, &mut w) {
            return;
        }
        if i == 0 {
            visit(h);
        } else {
            fill_row(i - 1, n, remaining, h, visit);
        }
        return;
    }
    for x in 0..h[j][j] {
        h[i][j] = x;
        fill_offdiag(i, j + 1, n, remaining, h, visit);
    }
    h[i][j] = 0;
}

/// Membership of `w` (zero before column `from`) in the lattice of rows
/// `from..4` of an upper-triangular `h`.
fn in_triangular(h: &[[i64; 4]; 4], from: usize, w: &mut [i64; 4]) -> bool {
    for c in from..4 {
        if w[c] % h[c][c] != 0 {
            return false;
        }
        let q = w[c] / h[c][c];
        if q != 0 {
            for k in c..4 {
                w[k] -= q * h[c][k];
            }
        }
    }
    true
}

/// All left ideals of norm `n`, by exhaustive search over sublattices of
/// index `n²` that contain `n·O`. Refuses `n` above [`MAX_ORACLE_NORM`].
pub fn enumerate_left_ideals_bruteforce(o: &Arc<Order>, n: u64) -> Result<Vec<LeftIdeal>> {
    enumerate_left_ideals_bruteforce_up_to(o, n, MAX_ORACLE_NORM)
}

/// [`enumerate_left_ideals_bruteforce`] with an explicit bound on `n`.
pub fn enumerate_left_ideals_bruteforce_up_to(
    o: &Arc<Order>,
    n: u64,
    max_n: u64,
) -> Result<Vec<LeftIdeal>> {
    if n == 0 {
        return Err(Error::Precondition("norm must be positive".into()));
    }
    if n > max_n {
        return Err(Error::Resource(format!("oracle norm {n} exceeds the limit {max_n}")));
    }
    let index = n.checked_mul(n).ok_or_else(|| Error::Resource("norm overflows".into()))?;
    let table: Vec<Vec<Vec<i64>>> = o
        .structure_constants()
        .iter()
        .map(|a| {
            a.iter()
                .map(|b| b.iter().map(|c| c.to_i64().expect("small structure constants")).collect())
                .collect()
        })
        .collect();
    let mut found = Vec::new();
    sublattices_containing(n, index, |h| {
        if is_left_stable(&table, h) {
            found.push(*h);
        }
    });
    let mut out = found
        .into_iter()
        .map(|h| {
            let m = Matrix::from_fn(4, 4, |r, c| Int::from(h[r][c]));
            LeftIdeal::from_order_coords(o.clone(), &m)
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

fn is_left_stable(table: &[Vec<Vec<i64>>], h: &[[i64; 4]; 4]) -> bool {
    for row in h {
        for t in table {
            let mut w = [0i64; 4];
            for (n, &rn) in row.iter().enumerate() {
                if rn != 0 {
                    for (s, ws) in w.iter_mut().enumerate() {
                        *ws += rn * t[n][s];
                    }
                }
            }
            if !in_triangular(h, 0, &mut w) {
                return false;
            }
        }
    }
    true
}

/// gcd of `nrd` over the basis and pairwise sums of basis elements.
pub fn norm_gcd_sample(i: &LeftIdeal) -> Int {
    let alg = i.order.algebra();
    let b = i.basis_coords();
    let mut g = Int::zero();
    for a in 0..4 {
        for c in a..4 {
            let x: crate::quaternion::Coords<Int> = if a == c {
                b[a].clone()
            } else {
                std::array::from_fn(|t| &b[a][t] + &b[c][t])
            };
            g = g.gcd(&alg.nrd_coords(&x).to_integer());
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{eichler_order, maximal_order};
    use crate::Algebra;

    fn max6() -> Arc<Order> {
        Arc::new(maximal_order(Arc::new(Algebra::from_ints(-1, 3).unwrap())).unwrap())
    }

    #[test]
    fn unit_and_scalar_ideals() {
        let o = max6();
        let unit = LeftIdeal::unit(o.clone());
        assert_eq!(ideal_norm(&unit).unwrap(), Int::one());
        assert!(unit.is_primitive());
        let two = LeftIdeal::scalar(o.clone(), &Int::from(2)).unwrap();
        assert_eq!(two.index(), Int::from(16));
        assert_eq!(ideal_norm(&two).unwrap(), Int::from(4));
        assert!(!two.is_primitive());
        assert_eq!(right_order(&two).unwrap(), *o);
        assert_eq!(two.primitive_part(), unit);
    }

    /// Every upper-triangular HNF with the given determinant, filtered by
    /// `n·Z⁴ ⊆ L` through an exact inverse.
    fn unpruned(n: i64, index: i64) -> Vec<[[i64; 4]; 4]> {
        let mut out = Vec::new();
        let divs: Vec<i64> = (1..=index).filter(|d| index % d == 0).collect();
        for &d0 in &divs {
            for &d1 in &divs {
                for &d2 in &divs {
                    if index % (d0 * d1 * d2) != 0 {
                        continue;
                    }
                    let d = [d0, d1, d2, index / (d0 * d1 * d2)];
                    let slots: Vec<(usize, usize)> =
                        (0..4).flat_map(|c| (0..c).map(move |r| (r, c))).collect();
                    let total: i64 = slots.iter().map(|&(_, c)| d[c]).product();
                    for code in 0..total {
                        let mut h = [[0i64; 4]; 4];
                        for i in 0..4 {
                            h[i][i] = d[i];
                        }
                        let mut t = code;
                        for &(r, c) in &slots {
                            h[r][c] = t % d[c];
                            t /= d[c];
                        }
                        let m = Matrix::from_fn(4, 4, |r, c| h[r][c]).to_rational();
                        let scaled = m.inverse().unwrap().scale(&num_rational::Ratio::from_integer(n));
                        if scaled.is_integral() {
                            out.push(h);
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn transversal_pruning_matches_unpruned_enumeration() {
        for (n, index) in [(2u64, 4u64), (3, 9), (4, 16), (9, 9), (6, 36)] {
            let mut pruned = Vec::new();
            sublattices_containing(n, index, |h| pruned.push(*h));
            pruned.sort();
            assert_eq!(pruned, unpruned(n as i64, index as i64), "n = {n}, index = {index}");
        }
        let mut count = 0;
        sublattices_containing(3, 9, |_| count += 1);
        // subspaces of dimension 2 in F₃⁴
        assert_eq!(count, 130);
        let mut all = 0;
        sublattices_containing(9, 9, |_| all += 1);
        assert_eq!(all, 1210);
    }

    #[test]
    fn splitting_ideals_have_norm_l() {
        let o = max6();
        let ideals = left_ideals_of_norm_l(&o, 5, 0).unwrap();
        assert_eq!(ideals.len(), 6);
        for i in &ideals {
            assert_eq!(ideal_norm(i).unwrap(), Int::from(5));
            assert!(i.is_primitive());
            assert_eq!(norm_gcd_sample(i), Int::from(5));
            assert_eq!(right_order(i).unwrap().reduced_discriminant().unwrap(), Int::from(6));
        }
        assert_eq!(ideals, left_ideals_of_norm_l(&o, 5, 99).unwrap());
    }

    #[test]
    fn ramified_ideal_squares_to_l() {
        let o = max6();
        for ell in [2u64, 3] {
            let p = two_sided_ideal(&o, ell).unwrap();
            let sq = ideal_product(p.lattice(), p.lattice(), &o).unwrap();
            assert_eq!(sq, o.scaled(&Int::from(ell)));
            assert_eq!(right_order(&p).unwrap(), *o);
        }
        assert!(matches!(two_sided_ideal(&o, 5), Err(Error::Precondition(_))));
    }

    #[test]
    fn oracle_agrees_for_small_primes() {
        let o = max6();
        for ell in [2u64, 3, 5, 7] {
            let fast = left_ideals_of_norm_l(&o, ell, 1).unwrap();
            let slow = enumerate_left_ideals_bruteforce(&o, ell).unwrap();
            assert_eq!(fast, slow, "ℓ = {ell}");
        }
        assert_eq!(enumerate_left_ideals_bruteforce(&o, 1).unwrap(), vec![LeftIdeal::unit(o.clone())]);
        assert!(matches!(enumerate_left_ideals_bruteforce(&o, 14), Err(Error::Resource(_))));
    }

    #[test]
    fn level_primes_match_the_oracle() {
        let o0 = maximal_order(Arc::new(Algebra::from_ints(-1, 3).unwrap())).unwrap();
        let e = Arc::new(eichler_order(&o0, &Int::from(5), 0).unwrap());
        let fast = left_ideals_of_norm_l(&e, 5, 0).unwrap();
        let slow = enumerate_left_ideals_bruteforce(&e, 5).unwrap();
        assert_eq!(fast, slow);
        // regression value: 2ℓ + 1
        assert_eq!(fast.len(), 11);
    }
}
