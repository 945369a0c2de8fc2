//! Center of a finite set of tree vertices: the middle vertex or middle
//! edge of a path of maximal length between members of the set.

use std::collections::BTreeSet;
use std::fmt;

use crate::bruhat_tits::{distance, geodesic, TreeVertex};
use crate::error::{Error, Result};

/// A vertex, or an unoriented edge stored with its smaller endpoint first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Center {
    Vertex(TreeVertex),
    Edge(TreeVertex, TreeVertex),
}

impl Center {
    pub fn edge(u: TreeVertex, w: TreeVertex) -> Self {
        if u <= w {
            Center::Edge(u, w)
        } else {
            Center::Edge(w, u)
        }
    }

    pub fn is_edge(&self) -> bool {
        matches!(self, Center::Edge(..))
    }

    pub fn vertices(&self) -> Vec<&TreeVertex> {
        match self {
            Center::Vertex(v) => vec![v],
            Center::Edge(u, w) => vec![u, w],
        }
    }
}

impl fmt::Display for Center {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Center::Vertex(v) => write!(f, "vertex {v}"),
            Center::Edge(u, w) => write!(f, "edge {{{u}, {w}}}"),
        }
    }
}

fn check_input(s: &[TreeVertex]) -> Result<()> {
    let first = s.first().ok_or_else(|| Error::Precondition("empty vertex set".into()))?;
    if let Some(v) = s.iter().find(|v| v.ell() != first.ell()) {
        return Err(Error::MixedPrimes(first.ell(), v.ell()));
    }
    Ok(())
}

/// Middle vertex or edge of the geodesic from `u` to `v`.
pub fn midpoint(u: &TreeVertex, v: &TreeVertex) -> Result<Center> {
    let path = geodesic(u, v)?;
    let n = path.len() - 1;
    Ok(if n % 2 == 0 {
        Center::Vertex(path[n / 2].clone())
    } else {
        Center::edge(path[n / 2].clone(), path[n / 2 + 1].clone())
    })
}

/// All pairs `(i, j)`, `i < j` (or `(0, 0)` for a singleton) realizing the
/// diameter of `s`.
pub fn diametral_pairs(s: &[TreeVertex]) -> Result<(u32, Vec<(usize, usize)>)> {
    check_input(s)?;
    let mut best = 0;
    let mut pairs = vec![(0, 0)];
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let d = distance(&s[i], &s[j])?;
            if d > best {
                best = d;
                pairs.clear();
            }
            if d == best && d > 0 {
                pairs.push((i, j));
            }
        }
    }
    Ok((best, pairs))
}

pub fn center(s: &[TreeVertex]) -> Result<Center> {
    let (_, pairs) = diametral_pairs(s)?;
    let (i, j) = pairs[0];
    let c = midpoint(&s[i], &s[j])?;
    if cfg!(debug_assertions) {
        for &(a, b) in &pairs[1..] {
            debug_assert_eq!(midpoint(&s[a], &s[b])?, c, "center depends on the diametral pair");
        }
    }
    Ok(c)
}

/// Union of the geodesics between all pairs of `s`, sorted.
pub fn spanned_subtree(s: &[TreeVertex]) -> Result<Vec<TreeVertex>> {
    check_input(s)?;
    let mut out: BTreeSet<TreeVertex> = s.iter().cloned().collect();
    // the subtree spanned by s is the union of geodesics from one member
    for v in &s[1..] {
        out.extend(geodesic(&s[0], v)?);
    }
    Ok(out.into_iter().collect())
}
