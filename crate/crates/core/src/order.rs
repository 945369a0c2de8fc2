//! Orders in a quaternion algebra as rank-4 lattices.
//!
//! Bases are rows of coordinates in `1, i, j, k`. Every order is stored
//! through its canonical lattice basis, so equality of orders is equality
//! of values.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{factorize, is_prime, is_squarefree, valuation};
use crate::error::{Error, Result};
use crate::linalg::{kernel_mod_p, Matrix};
use crate::quaternion::Coords;
use crate::splitting::splitting_mod_l;
use crate::{Algebra, Int, IntMatrix, Rat, RatLattice, RatMatrix};

/// Lattice generated by all products `x·y`, `x ∈ L`, `y ∈ M`.
pub fn product_lattice(alg: &Algebra, l: &RatLattice, m: &RatLattice) -> Result<RatLattice> {
    let mut gens = Vec::with_capacity(16);
    for x in l.basis_rows() {
        for y in m.basis_rows() {
            gens.push(alg.mul_coords(&to_coords(&x), &to_coords(&y)).to_vec());
        }
    }
    RatLattice::from_rows(gens)
}

pub(crate) fn one_coords() -> Coords<Int> {
    [Rat::one(), Rat::zero(), Rat::zero(), Rat::zero()]
}

pub(crate) fn to_coords(v: &[Rat]) -> Coords<Int> {
    [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]
}

/// `{x ∈ B : x·J ⊆ J}`.
pub fn left_order_of(alg: &Algebra, j: &RatLattice) -> Result<RatLattice> {
    multiplier_ring(alg, j, true)
}

/// `{x ∈ B : J·x ⊆ J}`.
pub fn right_order_of(alg: &Algebra, j: &RatLattice) -> Result<RatLattice> {
    multiplier_ring(alg, j, false)
}

/// The multipliers are the `x = Σ cᵢeᵢ` for which every `J`-coordinate of
/// every `x·f` (or `f·x`) is an integer: the dual of the lattice spanned by
/// the coefficient rows of those linear forms. No inverses are needed, so
/// zero divisors in split algebras are harmless.
fn multiplier_ring(alg: &Algebra, j: &RatLattice, left: bool) -> Result<RatLattice> {
    let units: Vec<Coords<Int>> = (0..4)
        .map(|i| {
            let mut e = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
            e[i] = Rat::one();
            e
        })
        .collect();
    let mut forms = Vec::with_capacity(16);
    for f in j.basis_rows() {
        let f = to_coords(&f);
        // column i: J-coordinates of eᵢ·f
        let cols = units
            .iter()
            .map(|e| {
                let p = if left { alg.mul_coords(e, &f) } else { alg.mul_coords(&f, e) };
                j.coordinates(&p)
            })
            .collect::<Result<Vec<_>>>()?;
        for t in 0..4 {
            forms.push(cols.iter().map(|c| c[t].clone()).collect());
        }
    }
    Ok(RatLattice::from_rows(forms)?.dual())
}

/// Outcome of [`check_order`]: empty `violations` means the lattice is an order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrderCheck {
    pub violations: Vec<String>,
}

impl OrderCheck {
    pub fn is_order(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every order invariant: contains 1, closed under products, and
/// integral reduced trace and norm (on the basis and on the trace pairing).
pub fn check_order(alg: &Algebra, lat: &RatLattice) -> OrderCheck {
    let mut violations = Vec::new();
    if lat.dim() != 4 {
        violations.push(format!("rank {} instead of 4", lat.dim()));
        return OrderCheck { violations };
    }
    if !lat.contains(&RatLattice::one_vector(4)) {
        violations.push("does not contain 1".into());
    }
    let rows = lat.basis_rows();
    for (a, x) in rows.iter().enumerate() {
        let x = to_coords(x);
        let n = alg.nrd_coords(&x);
        if !n.is_integer() {
            violations.push(format!("nrd(e{a}) = {n} is not integral"));
        }
        let t = alg.trd_coords(&x);
        if !t.is_integer() {
            violations.push(format!("trd(e{a}) = {t} is not integral"));
        }
        for (b, y) in rows.iter().enumerate() {
            let p = alg.mul_coords(&x, &to_coords(y));
            if !lat.contains(&p) {
                violations.push(format!("e{a}·e{b} leaves the lattice"));
            }
        }
    }
    OrderCheck { violations }
}

/// `|det(trd(eᵢ·eⱼ))|` for a lattice basis.
pub fn trace_gram(alg: &Algebra, lat: &RatLattice) -> RatMatrix {
    let rows = lat.basis_rows();
    Matrix::from_fn(4, 4, |a, b| {
        alg.trd_coords(&alg.mul_coords(&to_coords(&rows[a]), &to_coords(&rows[b])))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Order {
    algebra: Arc<Algebra>,
    lattice: RatLattice,
}

impl Order {
    /// Validates the order invariants.
    pub fn new(algebra: Arc<Algebra>, lattice: RatLattice) -> Result<Self> {
        let check = check_order(&algebra, &lattice);
        if !check.is_order() {
            return Err(Error::InvariantViolation(format!(
                "not an order: {}",
                check.violations.join(", ")
            )));
        }
        Ok(Order { algebra, lattice })
    }

    /// `Z⟨1, i', j', i'j'⟩` with `i' = den(a)·i`, `j' = den(b)·j`, so that
    /// `i'² = num(a)·den(a)` and `j'² = num(b)·den(b)` are integers.
    pub fn standard(algebra: Arc<Algebra>) -> Self {
        let da = Rat::from_integer(algebra.a().denom().clone());
        let db = Rat::from_integer(algebra.b().denom().clone());
        let z = Rat::zero;
        let rows = vec![
            vec![Rat::one(), z(), z(), z()],
            vec![z(), da.clone(), z(), z()],
            vec![z(), z(), db.clone(), z()],
            vec![z(), z(), z(), da * db],
        ];
        let lattice = RatLattice::from_rows(rows).expect("standard order has full rank");
        Order { algebra, lattice }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn lattice(&self) -> &RatLattice {
        &self.lattice
    }

    pub fn basis(&self) -> &RatMatrix {
        self.lattice.basis()
    }

    pub fn basis_coords(&self) -> Vec<Coords<Int>> {
        self.lattice.basis_rows().iter().map(|r| to_coords(r)).collect()
    }

    /// Coordinates of `x` in the order basis.
    pub fn coordinates(&self, x: &Coords<Int>) -> Result<Vec<Rat>> {
        self.lattice.coordinates(x)
    }

    /// Integral coordinates of an element known to lie in the order.
    pub fn int_coordinates(&self, x: &Coords<Int>) -> Result<Vec<Int>> {
        let c = self.coordinates(x)?;
        if c.iter().any(|v| !v.is_integer()) {
            return Err(Error::NotContained);
        }
        Ok(c.into_iter().map(|v| v.to_integer()).collect())
    }

    /// Coordinates of `1` in the order basis.
    pub fn one_in_basis(&self) -> Vec<Int> {
        self.int_coordinates(&one_coords()).expect("orders contain 1")
    }

    pub fn element(&self, coords: &[Int]) -> Coords<Int> {
        let v = self
            .basis()
            .vec_mul(&coords.iter().cloned().map(Rat::from_integer).collect::<Vec<_>>());
        to_coords(&v)
    }

    /// Structure constants `eₘ·eₙ = Σ table[m][n][s] eₛ` in the order basis.
    pub fn structure_constants(&self) -> Vec<Vec<Vec<Int>>> {
        let basis = self.basis_coords();
        let inv = self.basis().inverse().expect("order basis is invertible");
        basis
            .iter()
            .map(|x| {
                basis
                    .iter()
                    .map(|y| {
                        let p = self.algebra.mul_coords(x, y);
                        inv.vec_mul(&p)
                            .into_iter()
                            .map(|c| {
                                debug_assert!(c.is_integer());
                                c.to_integer()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn trace_gram(&self) -> RatMatrix {
        trace_gram(&self.algebra, &self.lattice)
    }

    /// Reduced discriminant: the square root of `|det(trd(eᵢeⱼ))|`.
    pub fn reduced_discriminant(&self) -> Result<Int> {
        let det = self.trace_gram().rat_det()?.abs();
        if !det.is_integer() {
            return Err(Error::InvariantViolation(format!(
                "trace form determinant {det} is not integral"
            )));
        }
        let det = det.to_integer();
        let root = det.sqrt();
        if &root * &root != det {
            return Err(Error::InvariantViolation(format!(
                "trace form determinant {det} is not a square"
            )));
        }
        Ok(root)
    }

    /// Index `[self : sub]` of a sublattice.
    pub fn index_of(&self, sub: &RatLattice) -> Result<Int> {
        self.lattice.index_of(sub)
    }

    pub fn contains_order(&self, other: &Order) -> bool {
        self.lattice.contains_lattice(&other.lattice)
    }

    /// `k·O` as a lattice.
    pub fn scaled(&self, k: &Int) -> RatLattice {
        self.lattice
            .scale(&Rat::from_integer(k.clone()))
            .expect("nonzero scale")
    }

    /// Target `ℓ`-valuation of the reduced discriminant of a maximal order.
    fn maximal_valuation(&self, ell: u64) -> u32 {
        u32::from(self.algebra.is_ramified_at(ell))
    }

    /// `ℓ`-radical of the reduced trace pairing, lifted and added to `ℓO`.
    pub fn trace_radical(&self, ell: u64) -> Result<RatLattice> {
        let p = Int::from(ell);
        let gram = self.trace_gram().map(|x| x.to_integer());
        let ker = kernel_mod_p(&gram, &p)?;
        let basis = self.basis();
        let mut gens = self.scaled(&p).basis().clone();
        if ker.rows() > 0 {
            gens = gens.vstack(&ker.to_rational().mul(basis)?)?;
        }
        RatLattice::from_generators(&gens)
    }

    /// Enlarges the order at `ℓ` until its reduced discriminant has minimal
    /// `ℓ`-valuation. Returns the order unchanged when it is already
    /// `ℓ`-maximal.
    pub fn maximalize_at(&self, ell: u64) -> Result<Order> {
        if !is_prime(ell) {
            return Err(Error::Precondition(format!("{ell} is not prime")));
        }
        let target = self.maximal_valuation(ell);
        let mut current = self.clone();
        loop {
            let disc = current.reduced_discriminant()?;
            let v = valuation(&disc, ell);
            if v <= target {
                return Ok(current);
            }
            // radical idealizer step
            let rad = current.trace_radical(ell)?;
            let bigger = left_order_of(&current.algebra, &rad)?;
            if bigger != current.lattice && bigger.contains_lattice(&current.lattice) {
                let next = Order::new(current.algebra.clone(), bigger)?;
                if next.reduced_discriminant()? < disc {
                    current = next;
                    continue;
                }
            }
            // hereditary but not maximal (or a degenerate trace form at 2):
            // adjoin an integral element of ℓ⁻¹·rad
            match current.overorder_from_radical(ell, &rad)? {
                Some(next) => current = next,
                None => {
                    return Err(Error::Internal(format!(
                        "maximalization stalled at {ell} with discriminant {disc}"
                    )))
                }
            }
        }
    }

    fn overorder_from_radical(&self, ell: u64, rad: &RatLattice) -> Result<Option<Order>> {
        let p = Int::from(ell);
        let rel = rad.relative_hnf(&self.lattice)?;
        // the radical modulo ℓO, as coordinate vectors in the order basis
        let gens: Vec<Vec<Int>> = rel
            .row_iter()
            .filter(|r| r.iter().any(|x| !x.is_multiple_of(&p)))
            .map(|r| r.iter().map(|x| x.mod_floor(&p)).collect())
            .collect();
        let span = crate::linalg::row_space_mod_p(&Matrix::from_rows(gens)?, &p);
        let dim = span.rows();
        let total = ell.checked_pow(dim as u32).ok_or_else(|| {
            Error::Resource(format!("radical search space {ell}^{dim} is too large"))
        })?;
        let alg = &self.algebra;
        let inv_ell = Rat::new(Int::one(), p.clone());
        // projective enumeration: first nonzero coefficient equal to 1
        for code in 1..total {
            let mut digits = Vec::with_capacity(dim);
            let mut c = code;
            for _ in 0..dim {
                digits.push(c % ell);
                c /= ell;
            }
            if digits.iter().rev().find(|&&d| d != 0) != Some(&1) {
                continue;
            }
            let mut y = vec![Int::zero(); 4];
            for (d, row) in digits.iter().zip(span.row_iter()) {
                for (yi, ri) in y.iter_mut().zip(row) {
                    *yi += Int::from(*d) * ri;
                }
            }
            let x = self.element(&y).map(|c| c * inv_ell.clone());
            if !alg.trd_coords(&x).is_integer() || !alg.nrd_coords(&x).is_integer() {
                continue;
            }
            if let Some(o) = self.adjoin(&x)? {
                return Ok(Some(o));
            }
        }
        Ok(None)
    }

    /// Smallest ring containing the order and `x`, if that ring is an order.
    fn adjoin(&self, x: &Coords<Int>) -> Result<Option<Order>> {
        let alg = &self.algebra;
        let mut rows = self.lattice.basis_rows();
        rows.push(x.to_vec());
        let mut lat = RatLattice::from_rows(rows)?;
        loop {
            let gram = trace_gram(alg, &lat);
            if !gram.is_integral() {
                return Ok(None);
            }
            if lat
                .basis_rows()
                .iter()
                .any(|r| !alg.nrd_coords(&to_coords(r)).is_integer())
            {
                return Ok(None);
            }
            let next = lat.sum(&product_lattice(alg, &lat, &lat)?)?;
            if next == lat {
                return Ok(Some(Order::new(alg.clone(), lat)?));
            }
            lat = next;
        }
    }

    /// Primes whose square divides the reduced discriminant or which divide
    /// it while the algebra is split there.
    fn non_maximal_primes(&self) -> Result<Vec<u64>> {
        let disc = self.reduced_discriminant()?;
        Ok(factorize(&disc)
            .into_iter()
            .filter(|&(p, e)| e > self.maximal_valuation(p))
            .map(|(p, _)| p)
            .collect())
    }

    pub fn is_maximal(&self) -> Result<bool> {
        Ok(self.non_maximal_primes()?.is_empty())
    }
}

/// A maximal order containing the standard order of `B`.
pub fn maximal_order(algebra: Arc<Algebra>) -> Result<Order> {
    let mut o = Order::standard(algebra.clone());
    for ell in o.non_maximal_primes()? {
        o = o.maximalize_at(ell)?;
    }
    let disc = o.reduced_discriminant()?;
    if disc != algebra.discriminant() {
        return Err(Error::Internal(format!(
            "maximal order has reduced discriminant {disc}, expected {}",
            algebra.discriminant()
        )));
    }
    Ok(o)
}

/// Eichler order of squarefree level `N` inside the maximal order `O₀`:
/// the elements whose splitting image at each `ℓ | N` is upper triangular
/// modulo `ℓ`.
pub fn eichler_order(o0: &Order, level: &Int, seed: u64) -> Result<Order> {
    if !level.is_positive() {
        return Err(Error::Precondition("level must be positive".into()));
    }
    if !is_squarefree(level) {
        return Err(Error::Precondition(format!("level {level} is not squarefree")));
    }
    let d = o0.algebra.discriminant();
    if !level.gcd(&d).is_one() {
        return Err(Error::Precondition(format!(
            "level {level} is not coprime to the discriminant {d}"
        )));
    }
    if !o0.is_maximal()? {
        return Err(Error::Precondition("Eichler orders are built inside a maximal order".into()));
    }
    let mut lattice = o0.lattice.clone();
    for (ell, _) in factorize(level) {
        let theta = splitting_mod_l(o0, ell, seed)?;
        let p = Int::from(ell);
        // functional x ↦ θ(x)₂₁ on the basis of O₀
        let functional = Matrix::from_rows(vec![(0..4)
            .map(|m| theta.image(m)[1][0].clone())
            .collect::<Vec<_>>()])?;
        let ker = kernel_mod_p(&functional, &p)?;
        let sub = ker
            .vstack(&IntMatrix::identity(4).scale(&p))?
            .to_rational()
            .mul(o0.basis())?;
        let local = RatLattice::from_generators(&sub)?;
        lattice = lattice.intersect(&local)?;
    }
    Order::new(o0.algebra.clone(), lattice)
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.basis())
    }
}

/// `nrd` of each basis vector as integers (only meaningful for orders).
pub fn basis_norms(o: &Order) -> Vec<Int> {
    o.basis_coords()
        .iter()
        .map(|x| o.algebra.nrd_coords(x).to_integer())
        .collect()
}
