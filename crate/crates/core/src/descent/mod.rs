//! Galois descent on finite configurations of local data: the level `N`
//! from the centers, the point `Q`, the twisting cocycle `n(σ)` with
//! `σQ = W_{n(σ)}Q`, and the checks on `φ̃` and minimality.

mod report;
mod scenario;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

pub use report::{CenterJson, ChecksJson, DescentReport, GroupJson, MinimalityEntry, PointJson};
pub use scenario::{GaloisScenario, LocalData, DEFAULT_TAU};

use crate::bruhat_tits::{distance, OrientedEdge, TreeVertex};
use crate::center::{center, spanned_subtree, Center};
use crate::error::{Error, Result};

/// Primes `n` with `σQ = W_n Q`.
pub type TwistSet = BTreeSet<u64>;

/// Largest group the closure will build.
pub const MAX_GROUP_ORDER: usize = 20_000;

/// Largest number of primes in `N·D` for the exhaustive `φ̃` check.
pub const MAX_TWIST_PRIMES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Plus,
    Minus,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Plus => Orientation::Minus,
            Orientation::Minus => Orientation::Plus,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Plus => "+",
            Orientation::Minus => "-",
        })
    }
}

/// Local data of a point on the Shimura curve of level `N`: an oriented
/// edge at each `ℓ | N`, a vertex at the other listed primes, a bit at each
/// `ℓ | D`, and the opaque archimedean marker.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdelicPoint {
    pub level: u64,
    pub edges: BTreeMap<u64, OrientedEdge>,
    pub vertices: BTreeMap<u64, TreeVertex>,
    pub orientations: BTreeMap<u64, Orientation>,
    pub tau: String,
}

/// A point of level one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelOnePoint {
    pub vertices: BTreeMap<u64, TreeVertex>,
    pub orientations: BTreeMap<u64, Orientation>,
    pub tau: String,
}

/// `W_n`: reverses the edges at `ℓ ∈ n`, `ℓ | N`, and flips the bits at
/// `ℓ ∈ n`, `ℓ | D`.
pub fn atkin_lehner(q: &AdelicPoint, n: &TwistSet) -> Result<AdelicPoint> {
    let mut out = q.clone();
    for ell in n {
        if let Some(e) = out.edges.get_mut(ell) {
            *e = e.reversed();
        } else if let Some(o) = out.orientations.get_mut(ell) {
            *o = o.flipped();
        } else {
            return Err(Error::Precondition(format!("{ell} divides neither N nor D")));
        }
    }
    Ok(out)
}

/// Replaces every edge by its origin.
pub fn phi(q: &AdelicPoint) -> LevelOnePoint {
    let mut vertices = q.vertices.clone();
    for (ell, e) in &q.edges {
        vertices.insert(*ell, e.origin().clone());
    }
    LevelOnePoint { vertices, orientations: q.orientations.clone(), tau: q.tau.clone() }
}

/// `(φ(Q), φ(W_N Q))`.
pub fn phi_tilde(q: &AdelicPoint) -> (LevelOnePoint, LevelOnePoint) {
    let n: TwistSet = q.edges.keys().copied().collect();
    let w = atkin_lehner(q, &n).expect("edge primes divide N");
    (phi(q), phi(&w))
}

/// The minimal subtree around `S_ℓ` with its members located in it.
#[derive(Clone, Debug)]
struct Arena {
    ell: u64,
    hull: Vec<TreeVertex>,
    index: BTreeMap<TreeVertex, usize>,
    members: Vec<usize>,
}

/// A group element through its action: one permutation of each hull and
/// one flip per prime of `D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    perms: Vec<Vec<usize>>,
    flips: Vec<bool>,
}

impl GroupElement {
    fn identity(arenas: &[Arena], d_primes: usize) -> Self {
        GroupElement {
            perms: arenas.iter().map(|a| (0..a.hull.len()).collect()).collect(),
            flips: vec![false; d_primes],
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        GroupElement {
            perms: self
                .perms
                .iter()
                .zip(&other.perms)
                .map(|(p, q)| q.iter().map(|&i| p[i]).collect())
                .collect(),
            flips: self.flips.iter().zip(&other.flips).map(|(a, b)| a ^ b).collect(),
        }
    }
}

/// A validated scenario with the group closure and the actions extended to
/// the spanned subtrees.
#[derive(Clone, Debug)]
pub struct Descent {
    scenario: GaloisScenario,
    arenas: Vec<Arena>,
    d_primes: Vec<u64>,
    generators: Vec<(String, GroupElement)>,
    elements: Vec<(String, GroupElement)>,
}

impl Descent {
    pub fn new(scenario: GaloisScenario) -> Result<Self> {
        let violations = scenario.violations();
        if !violations.is_empty() {
            return Err(Error::Scenario(violations));
        }
        let mut arenas = Vec::new();
        for (&ell, data) in &scenario.local {
            let hull = spanned_subtree(&data.vertices)?;
            let index: BTreeMap<TreeVertex, usize> =
                hull.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
            let members = data.vertices.iter().map(|v| index[v]).collect();
            arenas.push(Arena { ell, hull, index, members });
        }
        let d_primes = scenario.d_primes();
        let mut generators = Vec::new();
        for g in &scenario.generators {
            let perms = arenas
                .iter()
                .map(|a| extend_to_hull(a, &scenario.local_action(a.ell, g)))
                .collect::<Result<Vec<_>>>()?;
            let flips = d_primes.iter().map(|&p| scenario.flips(p, g)).collect();
            generators.push((g.clone(), GroupElement { perms, flips }));
        }
        let elements = closure(&arenas, d_primes.len(), &generators)?;
        Ok(Descent { scenario, arenas, d_primes, generators, elements })
    }

    pub fn scenario(&self) -> &GaloisScenario {
        &self.scenario
    }

    /// Group elements named by a shortest word in the generators.
    pub fn elements(&self) -> &[(String, GroupElement)] {
        &self.elements
    }

    pub fn generators(&self) -> &[(String, GroupElement)] {
        &self.generators
    }

    pub fn element(&self, name: &str) -> Result<&GroupElement> {
        self.elements
            .iter()
            .chain(&self.generators)
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
            .ok_or_else(|| Error::Precondition(format!("unknown group element {name:?}")))
    }

    /// Centers of the local sets and their product of edge primes.
    pub fn compute_level(&self) -> Result<(u64, BTreeMap<u64, Center>)> {
        let mut centers = BTreeMap::new();
        let mut n: u64 = 1;
        for (&ell, data) in &self.scenario.local {
            let c = center(&data.vertices)?;
            if c.is_edge() {
                n = n
                    .checked_mul(ell)
                    .ok_or_else(|| Error::Resource("level overflows 64 bits".into()))?;
            }
            centers.insert(ell, c);
        }
        Ok((n, centers))
    }

    /// Edges start at their smaller endpoint; bits start at `+`.
    pub fn choose_point(&self, centers: &BTreeMap<u64, Center>) -> Result<AdelicPoint> {
        let mut q = AdelicPoint {
            level: 1,
            edges: BTreeMap::new(),
            vertices: BTreeMap::new(),
            orientations: self.d_primes.iter().map(|&p| (p, Orientation::Plus)).collect(),
            tau: self.scenario.tau.clone(),
        };
        for (&ell, c) in centers {
            match c {
                Center::Vertex(v) => {
                    q.vertices.insert(ell, v.clone());
                }
                Center::Edge(u, w) => {
                    q.level *= ell;
                    q.edges.insert(ell, OrientedEdge::new(u.clone(), w.clone())?);
                }
            }
        }
        Ok(q)
    }

    fn arena(&self, ell: u64) -> Result<(usize, &Arena)> {
        self.arenas
            .iter()
            .enumerate()
            .find(|(_, a)| a.ell == ell)
            .ok_or_else(|| Error::Precondition(format!("no local data at {ell}")))
    }

    fn move_vertex(&self, g: &GroupElement, ell: u64, v: &TreeVertex) -> Result<TreeVertex> {
        let (k, a) = self.arena(ell)?;
        let i = a
            .index
            .get(v)
            .ok_or_else(|| Error::Precondition(format!("{v} is outside the spanned subtree")))?;
        Ok(a.hull[g.perms[k][*i]].clone())
    }

    /// `σQ`, componentwise.
    pub fn galois_apply(&self, g: &GroupElement, q: &AdelicPoint) -> Result<AdelicPoint> {
        let mut out = q.clone();
        for (&ell, e) in &q.edges {
            let o = self.move_vertex(g, ell, e.origin())?;
            let t = self.move_vertex(g, ell, e.terminus())?;
            out.edges.insert(ell, OrientedEdge::new(o, t)?);
        }
        for (&ell, v) in &q.vertices {
            out.vertices.insert(ell, self.move_vertex(g, ell, v)?);
        }
        for (k, p) in self.d_primes.iter().enumerate() {
            if g.flips[k] {
                if let Some(o) = out.orientations.get_mut(p) {
                    *o = o.flipped();
                }
            }
        }
        Ok(out)
    }

    /// The `n` with `σQ = W_n Q`.
    pub fn galois_twist(&self, g: &GroupElement, q: &AdelicPoint) -> Result<TwistSet> {
        let moved = self.galois_apply(g, q)?;
        let mut n = TwistSet::new();
        for (ell, e) in &q.edges {
            if moved.edges[ell] != *e {
                n.insert(*ell);
            }
        }
        for (ell, o) in &q.orientations {
            if moved.orientations[ell] != *o {
                n.insert(*ell);
            }
        }
        if atkin_lehner(q, &n)? != moved {
            return Err(Error::Inconsistent(format!(
                "the group moves the center of the point; no Atkin-Lehner twist matches ({n:?})"
            )));
        }
        Ok(n)
    }

    /// Per prime of `N`: the vertices of the spanned subtree fixed by every
    /// generator, which must not exist.
    pub fn verify_minimality(&self, centers: &BTreeMap<u64, Center>) -> Vec<MinimalityEntry> {
        let mut out = Vec::new();
        for (k, a) in self.arenas.iter().enumerate() {
            if !centers.get(&a.ell).is_some_and(Center::is_edge) {
                continue;
            }
            let fixed: Vec<String> = (0..a.hull.len())
                .filter(|&i| self.generators.iter().all(|(_, g)| g.perms[k][i] == i))
                .map(|i| a.hull[i].to_string())
                .collect();
            out.push(MinimalityEntry { prime: a.ell, passed: fixed.is_empty(), fixed_vertices: fixed });
        }
        out
    }

    /// Whether the group is transitive on every `S_ℓ`.
    pub fn is_transitive(&self) -> bool {
        self.arenas.iter().enumerate().all(|(k, a)| {
            let orbit: BTreeSet<usize> =
                self.elements.iter().map(|(_, g)| g.perms[k][a.members[0]]).collect();
            a.members.iter().all(|m| orbit.contains(m))
        })
    }

    /// Runs the whole pipeline.
    pub fn run(&self) -> Result<DescentReport> {
        let (n, centers) = self.compute_level()?;
        let q = self.choose_point(&centers)?;
        let mut twists: BTreeMap<&GroupElement, TwistSet> = BTreeMap::new();
        for (_, g) in &self.elements {
            twists.insert(g, self.galois_twist(g, &q)?);
        }
        let mut homomorphism = true;
        for (_, s) in &self.elements {
            for (_, t) in &self.elements {
                let st = s.compose(t);
                let expected: TwistSet = twists[s].symmetric_difference(&twists[t]).copied().collect();
                if twists.get(&st) != Some(&expected) {
                    homomorphism = false;
                }
            }
        }
        let phi_tilde_injective = phi_tilde_is_injective(&q)?;
        let minimality = self.verify_minimality(&centers);
        let checks = ChecksJson {
            homomorphism,
            phi_tilde_injective,
            minimality: minimality.iter().all(|m| m.passed),
            transitive: self.is_transitive(),
        };
        let cocycle = self
            .generators
            .iter()
            .map(|(name, g)| (name.clone(), twists[g].iter().copied().collect()))
            .collect();
        let group = GroupJson {
            order: self.elements.len(),
            elements: self
                .elements
                .iter()
                .map(|(name, g)| (name.clone(), twists[g].iter().copied().collect()))
                .collect(),
        };
        Ok(DescentReport {
            n,
            d: self.scenario.d,
            centers: centers.iter().map(|(&l, c)| (l, CenterJson::from(c))).collect(),
            point: PointJson::from(&q),
            cocycle,
            group,
            checks,
            minimality,
            relations_checked: self.scenario.relations_checked,
            conventions: report::Conventions::default(),
        })
    }
}

/// Whether `φ̃` separates all points `W_m Q`, `m ⊆ primes(N·D)`, i.e. all
/// orientation choices on the same centers.
pub fn phi_tilde_is_injective(q: &AdelicPoint) -> Result<bool> {
    let primes: Vec<u64> = q.edges.keys().chain(q.orientations.keys()).copied().collect();
    if primes.len() > MAX_TWIST_PRIMES {
        return Err(Error::Resource(format!(
            "{} primes in N·D exceed the limit {MAX_TWIST_PRIMES}",
            primes.len()
        )));
    }
    let mut images = BTreeSet::new();
    for mask in 0u32..(1 << primes.len()) {
        let m: TwistSet = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        images.insert(phi_tilde(&atkin_lehner(q, &m)?));
    }
    Ok(images.len() == 1 << primes.len())
}

/// Extends an isometric permutation of the members to the spanned subtree:
/// each hull vertex goes to the hull vertex with the permuted distance
/// profile.
fn extend_to_hull(a: &Arena, perm: &[usize]) -> Result<Vec<usize>> {
    let dist: Vec<Vec<u32>> = a
        .hull
        .iter()
        .map(|x| {
            a.members
                .iter()
                .map(|&m| distance(x, &a.hull[m]).expect("same prime"))
                .collect()
        })
        .collect();
    let m = a.members.len();
    (0..a.hull.len())
        .map(|x| {
            (0..a.hull.len())
                .find(|&y| (0..m).all(|i| dist[y][perm[i]] == dist[x][i]))
                .ok_or_else(|| {
                    Error::Inconsistent(format!(
                        "the action at {} does not extend to the spanned subtree",
                        a.ell
                    ))
                })
        })
        .collect()
}

fn closure(
    arenas: &[Arena],
    d_primes: usize,
    generators: &[(String, GroupElement)],
) -> Result<Vec<(String, GroupElement)>> {
    let id = GroupElement::identity(arenas, d_primes);
    let mut seen: BTreeSet<GroupElement> = BTreeSet::from([id.clone()]);
    let mut out = vec![("e".to_string(), id.clone())];
    let mut queue = VecDeque::from([("e".to_string(), id)]);
    while let Some((word, h)) = queue.pop_front() {
        for (name, g) in generators {
            let next = g.compose(&h);
            if seen.insert(next.clone()) {
                if seen.len() > MAX_GROUP_ORDER {
                    return Err(Error::Resource(format!(
                        "the group has more than {MAX_GROUP_ORDER} elements"
                    )));
                }
                let w = if word == "e" { name.clone() } else { format!("{name}*{word}") };
                out.push((w.clone(), next.clone()));
                queue.push_back((w, next));
            }
        }
    }
    Ok(out)
}

pub fn compute_level(s: &GaloisScenario) -> Result<(u64, BTreeMap<u64, Center>)> {
    Descent::new(s.clone())?.compute_level()
}

pub fn run_descent(s: &GaloisScenario) -> Result<DescentReport> {
    Descent::new(s.clone())?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWAP: &str = r#"{"D": 6, "generators": ["s"],
        "local": {"5": {"vertices": ["5:[[1,0],[0,1]]", "5:[[5,0],[0,1]]"], "action": {"s": [1, 0]}}}}"#;

    #[test]
    fn swap_scenario() {
        let d = Descent::new(GaloisScenario::from_json(SWAP).unwrap()).unwrap();
        let (n, centers) = d.compute_level().unwrap();
        assert_eq!(n, 5);
        let q = d.choose_point(&centers).unwrap();
        assert_eq!(q.edges[&5].origin(), &TreeVertex::root(5));
        let s = d.element("s").unwrap();
        assert_eq!(d.galois_twist(s, &q).unwrap(), TwistSet::from([5]));
        assert_eq!(d.galois_apply(s, &q).unwrap(), atkin_lehner(&q, &TwistSet::from([5])).unwrap());
        assert_eq!(phi(&q).vertices[&5], TreeVertex::root(5));
        let w = atkin_lehner(&q, &TwistSet::from([5])).unwrap();
        assert_eq!(phi(&w).vertices[&5], "5:[[5,0],[0,1]]".parse().unwrap());
        let r = d.run().unwrap();
        assert!(r.checks.passed());
        assert_eq!(r.cocycle["s"], vec![5]);
    }

    #[test]
    fn atkin_lehner_group_law() {
        let d = Descent::new(GaloisScenario::from_json(SWAP).unwrap()).unwrap();
        let (_, centers) = d.compute_level().unwrap();
        let q = d.choose_point(&centers).unwrap();
        let subsets = [TwistSet::new(), TwistSet::from([5]), TwistSet::from([2]), TwistSet::from([2, 3, 5])];
        for m in &subsets {
            assert_eq!(atkin_lehner(&atkin_lehner(&q, m).unwrap(), m).unwrap(), q);
            for n in &subsets {
                let lhs = atkin_lehner(&atkin_lehner(&q, n).unwrap(), m).unwrap();
                let sym: TwistSet = m.symmetric_difference(n).copied().collect();
                assert_eq!(lhs, atkin_lehner(&q, &sym).unwrap());
            }
        }
        assert!(matches!(atkin_lehner(&q, &TwistSet::from([7])), Err(Error::Precondition(_))));
    }

    #[test]
    fn trivial_group() {
        let d = Descent::new(GaloisScenario::from_json(r#"{"D": 1}"#).unwrap()).unwrap();
        let r = d.run().unwrap();
        assert_eq!(r.n, 1);
        assert!(r.cocycle.is_empty());
        assert_eq!(r.group.order, 1);
        assert!(r.checks.passed());
    }
}
