//! JSON forms of algebras, orders and ideals. Rationals are always the
//! strings `"num/den"`.

use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::LeftIdeal;
use crate::order::Order;
use crate::{Algebra, Int, Rat, RatLattice, RatMatrix};

pub fn rat_to_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"n"` or `"n/d"` with `d ≠ 0`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Int = n.parse().map_err(|_| bad())?;
    let d: Int = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub a: String,
    pub b: String,
}

impl AlgebraJson {
    pub fn of(alg: &Algebra) -> Self {
        AlgebraJson { a: rat_to_string(alg.a()), b: rat_to_string(alg.b()) }
    }

    pub fn parse(&self) -> Result<Algebra> {
        Algebra::new(parse_rat(&self.a)?, parse_rat(&self.b)?)
    }
}

/// `{algebra: {a, b}, basis: 4×4 strings}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeJson {
    pub algebra: AlgebraJson,
    pub basis: Vec<Vec<String>>,
}

impl LatticeJson {
    pub fn new(alg: &Algebra, basis: &RatMatrix) -> Self {
        LatticeJson {
            algebra: AlgebraJson::of(alg),
            basis: basis.row_iter().map(|r| r.iter().map(rat_to_string).collect()).collect(),
        }
    }

    pub fn of_order(o: &Order) -> Self {
        Self::new(o.algebra(), o.basis())
    }

    pub fn of_ideal(i: &LeftIdeal) -> Self {
        Self::new(i.order().algebra(), i.lattice().basis())
    }

    /// The algebra and the lattice spanned by the rows.
    pub fn parse(&self) -> Result<(Arc<Algebra>, RatLattice)> {
        let alg = Arc::new(self.algebra.parse()?);
        if self.basis.len() != 4 || self.basis.iter().any(|r| r.len() != 4) {
            return Err(Error::Parse("basis must be a 4x4 array".into()));
        }
        let rows = self
            .basis
            .iter()
            .map(|r| r.iter().map(|x| parse_rat(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok((alg, RatLattice::from_rows(rows)?))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
    }
}

/// Ideal listing entry with the norm and the HNF in order coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IdealJson {
    pub algebra: AlgebraJson,
    pub basis: Vec<Vec<String>>,
    pub norm: String,
    pub primitive: bool,
    pub order_coords: Vec<Vec<String>>,
}

impl IdealJson {
    pub fn of(i: &LeftIdeal) -> Result<Self> {
        let l = LatticeJson::of_ideal(i);
        Ok(IdealJson {
            algebra: l.algebra,
            basis: l.basis,
            norm: i.norm()?.to_string(),
            primitive: i.is_primitive(),
            order_coords: i
                .order_coords()
                .row_iter()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect(),
        })
    }
}
