//! The Bruhat-Tits tree of `PGL₂(Q_ℓ)`: vertices are homothety classes of
//! rank-2 lattices, represented by a primitive row-HNF `[[a,b],[0,d]]`
//! whose determinant is a power of `ℓ`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{is_prime, pow_u64, valuation};
use crate::error::{Error, Result};
use crate::ideal::{ideal_norm, LeftIdeal};
use crate::linalg::{row_lattice_basis, Matrix};
use crate::splitting::local_splitting;
use crate::{Int, IntMatrix, RatMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    ell: u64,
    a: Int,
    b: Int,
    d: Int,
}

impl TreeVertex {
    /// The class of the standard lattice.
    pub fn root(ell: u64) -> Self {
        TreeVertex { ell, a: Int::one(), b: Int::zero(), d: Int::one() }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn entries(&self) -> (&Int, &Int, &Int) {
        (&self.a, &self.b, &self.d)
    }

    pub fn matrix(&self) -> IntMatrix {
        Matrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => self.a.clone(),
            (0, 1) => self.b.clone(),
            (1, 1) => self.d.clone(),
            _ => Int::zero(),
        })
    }

    /// `v_ℓ(det)` of the representative.
    pub fn level(&self) -> u32 {
        valuation(&(&self.a * &self.d), self.ell)
    }

    pub fn is_root(&self) -> bool {
        self.a.is_one() && self.d.is_one()
    }

    /// The `ℓ + 1` classes of index-`ℓ` sublattices.
    pub fn neighbors(&self) -> Vec<TreeVertex> {
        let ell = self.ell;
        let m = self.matrix();
        let l = Int::from(ell);
        let mut out: Vec<TreeVertex> = (0..ell)
            .map(|j| Matrix::from_rows(vec![vec![Int::one(), Int::from(j)], vec![Int::zero(), l.clone()]]).unwrap())
            .chain(std::iter::once(
                Matrix::from_rows(vec![vec![l.clone(), Int::zero()], vec![Int::zero(), Int::one()]]).unwrap(),
            ))
            .map(|s| canonicalize_int(ell, &s.mul(&m).expect("2x2")).expect("nonsingular"))
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:[[{},{}],[0,{}]]", self.ell, self.a, self.b, self.d)
    }
}

impl FromStr for TreeVertex {
    type Err = Error;

    /// Parses `ℓ:[[a,b],[c,d]]` and canonicalizes the matrix.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed vertex {s:?}"));
        let (ell, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let ell: u64 = ell.trim().parse().map_err(|_| bad())?;
        if !is_prime(ell) {
            return Err(Error::Parse(format!("vertex prime {ell} is not prime")));
        }
        let compact: String = rest.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix("[[")
            .and_then(|x| x.strip_suffix("]]"))
            .ok_or_else(bad)?;
        let rows: Vec<Vec<Int>> = inner
            .split("],[")
            .map(|r| r.split(',').map(|x| x.parse::<Int>().map_err(|_| bad())).collect())
            .collect::<Result<_>>()?;
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            return Err(bad());
        }
        canonicalize_int(ell, &Matrix::from_rows(rows)?)
            .map_err(|e| Error::Parse(format!("vertex {s:?}: {e}")))
    }
}

/// Canonical vertex of the class of the row lattice of `m`.
pub fn canonicalize(ell: u64, m: &RatMatrix) -> Result<TreeVertex> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::Dimension("vertex matrices are 2x2".into()));
    }
    let (_, int) = m.clear_denominators();
    canonicalize_int(ell, &int)
}

pub fn canonicalize_int(ell: u64, m: &IntMatrix) -> Result<TreeVertex> {
    if !is_prime(ell) {
        return Err(Error::Precondition(format!("{ell} is not prime")));
    }
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::Dimension("vertex matrices are 2x2".into()));
    }
    let det = m.det()?;
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let c = m.content();
    let m = m.map(|x| x / &c);
    let v = valuation(&m.det()?, ell);
    // the ℓ-part of the lattice, completed by ℓ^v·Z² at every other prime
    let gens = m.vstack(&IntMatrix::identity(2).scale(&pow_u64(ell, v)))?;
    let mut h = row_lattice_basis(&gens)?;
    let l = Int::from(ell);
    while h.entries().iter().all(|x| x.is_multiple_of(&l)) {
        h = h.map(|x| x / &l);
    }
    Ok(TreeVertex {
        ell,
        a: h[(0, 0)].clone(),
        b: h[(0, 1)].clone(),
        d: h[(1, 1)].clone(),
    })
}

fn same_prime(u: &TreeVertex, v: &TreeVertex) -> Result<()> {
    if u.ell != v.ell {
        return Err(Error::MixedPrimes(u.ell, v.ell));
    }
    Ok(())
}

/// Tree distance from the elementary divisors `e₁ | e₂` of the relative
/// matrix: `v_ℓ(e₂) − v_ℓ(e₁)`.
pub fn distance(u: &TreeVertex, v: &TreeVertex) -> Result<u32> {
    same_prime(u, v)?;
    // U·adj(V) is an integral multiple of U·V⁻¹
    let adj = Matrix::from_rows(vec![
        vec![v.d.clone(), -v.b.clone()],
        vec![Int::zero(), v.a.clone()],
    ])?;
    let r = u.matrix().mul(&adj)?;
    let e1 = r.content();
    let det = r.det()?.abs();
    let e2 = &det / &e1;
    Ok(valuation(&e2, u.ell) - valuation(&e1, u.ell))
}

pub fn are_adjacent(u: &TreeVertex, v: &TreeVertex) -> Result<bool> {
    Ok(distance(u, v)? == 1)
}

/// The unique path from `u` to `v`, both endpoints included.
pub fn geodesic(u: &TreeVertex, v: &TreeVertex) -> Result<Vec<TreeVertex>> {
    let mut d = distance(u, v)?;
    let mut path = vec![u.clone()];
    let mut cur = u.clone();
    while d > 0 {
        let next = cur
            .neighbors()
            .into_iter()
            .find(|w| distance(w, v).map(|x| x + 1 == d).unwrap_or(false))
            .ok_or_else(|| Error::Internal("no neighbor closer to the target".into()))?;
        path.push(next.clone());
        cur = next;
        d -= 1;
    }
    Ok(path)
}

/// All vertices within distance `r` of `center`, sorted.
pub fn ball(center: &TreeVertex, r: u32) -> Vec<TreeVertex> {
    let mut seen = BTreeSet::new();
    seen.insert(center.clone());
    let mut queue = VecDeque::from([(center.clone(), 0u32)]);
    while let Some((v, k)) = queue.pop_front() {
        if k == r {
            continue;
        }
        for w in v.neighbors() {
            if seen.insert(w.clone()) {
                queue.push_back((w, k + 1));
            }
        }
    }
    seen.into_iter().collect()
}

/// Vertices at distance exactly `r` from `center`, sorted.
pub fn sphere(center: &TreeVertex, r: u32) -> Vec<TreeVertex> {
    ball(center, r)
        .into_iter()
        .filter(|v| distance(center, v).map(|d| d == r).unwrap_or(false))
        .collect()
}

/// An edge with a chosen direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedEdge {
    origin: TreeVertex,
    terminus: TreeVertex,
}

impl OrientedEdge {
    pub fn new(origin: TreeVertex, terminus: TreeVertex) -> Result<Self> {
        if !are_adjacent(&origin, &terminus)? {
            return Err(Error::InvariantViolation(format!(
                "{origin} and {terminus} are not adjacent"
            )));
        }
        Ok(OrientedEdge { origin, terminus })
    }

    pub fn origin(&self) -> &TreeVertex {
        &self.origin
    }

    pub fn terminus(&self) -> &TreeVertex {
        &self.terminus
    }

    pub fn reversed(&self) -> Self {
        OrientedEdge { origin: self.terminus.clone(), terminus: self.origin.clone() }
    }
}

impl fmt::Display for OrientedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.origin, self.terminus)
    }
}

/// Vertex of the local component at `ℓ` of a left ideal: the row lattice
/// of `θ(I)` under a splitting modulo a sufficient power of `ℓ`.
pub fn localize_ideal(i: &LeftIdeal, ell: u64, seed: u64) -> Result<TreeVertex> {
    let o = i.order();
    if !is_prime(ell) {
        return Err(Error::Precondition(format!("{ell} is not prime")));
    }
    if valuation(&o.reduced_discriminant()?, ell) != 0 {
        return Err(Error::Precondition(format!(
            "{ell} divides the reduced discriminant of the order"
        )));
    }
    let target = valuation(&ideal_norm(i)?, ell);
    for k in target + 1..=target + 4 {
        let theta = local_splitting(o, ell, k, seed)?;
        let mut rows = Vec::with_capacity(10);
        for f in i.order_coords().row_iter() {
            let img = theta.apply(f);
            rows.push(img[0].to_vec());
            rows.push(img[1].to_vec());
        }
        let gens = Matrix::from_rows(rows)?.vstack(&IntMatrix::identity(2).scale(theta.modulus()))?;
        let h = row_lattice_basis(&gens)?;
        if valuation(&h.det()?.abs(), ell) == target {
            return canonicalize_int(ell, &h);
        }
    }
    Err(Error::Internal(format!("localization at {ell} did not stabilize")))
}

/// DOT graph of a ball, with `marked` vertices filled.
pub fn ball_dot(center: &TreeVertex, r: u32, marked: &BTreeSet<TreeVertex>) -> String {
    let verts = ball(center, r);
    let mut out = String::from("graph tree {\n");
    for (n, v) in verts.iter().enumerate() {
        let style = if marked.contains(v) { ", style=filled" } else { "" };
        out.push_str(&format!("  n{n} [label=\"{v}\"{style}];\n"));
    }
    for (a, u) in verts.iter().enumerate() {
        for (b, w) in verts.iter().enumerate().skip(a + 1) {
            if distance(u, w) == Ok(1) {
                out.push_str(&format!("  n{a} -- n{b};\n"));
            }
        }
    }
    out.push_str("}\n");
    out
}
