//! Trees of primitive left ideals of `ℓ`-power norm and their comparison
//! with balls in the Bruhat-Tits tree.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use crate::arith::valuation;
use crate::bruhat_tits::{ball, distance, localize_ideal, TreeVertex};
use crate::error::{Error, Result};
use crate::ideal::{compose, ideal_norm, left_ideals_of_norm_l, LeftIdeal};
use crate::order::Order;
use crate::Int;

pub const MAX_TREE_DEPTH: u32 = 3;

/// Node `(level, index)` into [`IdealTree::levels`].
pub type NodeId = (usize, usize);

#[derive(Clone, Debug)]
pub struct IdealTree {
    root: Arc<Order>,
    ell: u64,
    levels: Vec<Vec<LeftIdeal>>,
    /// `(parent, child)` with the child one level deeper and contained in the parent.
    edges: Vec<(NodeId, NodeId)>,
}

impl IdealTree {
    pub fn root(&self) -> &Arc<Order> {
        &self.root
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn levels(&self) -> &[Vec<LeftIdeal>] {
        &self.levels
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> &LeftIdeal {
        &self.levels[id.0][id.1]
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(k, l)| (0..l.len()).map(move |i| (k, i)))
    }

    /// DOT graph; nodes carry the norm and a digest of the canonical HNF.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph ideals {\n");
        for (k, i) in self.node_ids() {
            let node = self.node((k, i));
            out.push_str(&format!(
                "  n{k}_{i} [label=\"{}^{k} {}\", level={k}];\n",
                self.ell,
                node.digest()
            ));
        }
        for ((pk, pi), (ck, ci)) in &self.edges {
            out.push_str(&format!("  n{pk}_{pi} -> n{ck}_{ci};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Primitive left ideals of norm `ℓᵏ`, `k ≤ depth`, each level obtained
/// from the previous one by multiplying with norm-`ℓ` ideals of the right
/// orders. Children are the smaller ideals.
pub fn build_ideal_tree(o: &Arc<Order>, ell: u64, depth: u32, seed: u64) -> Result<IdealTree> {
    if depth > MAX_TREE_DEPTH {
        return Err(Error::Resource(format!("depth {depth} exceeds the limit {MAX_TREE_DEPTH}")));
    }
    if !crate::arith::is_prime(ell) {
        return Err(Error::Precondition(format!("{ell} is not prime")));
    }
    if valuation(&o.reduced_discriminant()?, ell) != 0 {
        return Err(Error::Precondition(format!(
            "{ell} divides the reduced discriminant of the order"
        )));
    }
    let mut levels = vec![vec![LeftIdeal::unit(o.clone())]];
    let mut edges = Vec::new();
    for k in 0..depth as usize {
        let mut next: BTreeMap<LeftIdeal, usize> = BTreeMap::new();
        let mut links = Vec::new();
        for (pi, parent) in levels[k].iter().enumerate() {
            let right = Arc::new(parent.right_order()?);
            let mut children = 0;
            for step in left_ideals_of_norm_l(&right, ell, seed)? {
                let child = compose(parent, &step)?;
                if !child.is_primitive() {
                    continue;
                }
                children += 1;
                if next.insert(child, pi).is_some() {
                    return Err(Error::Internal("an ideal has two parents".into()));
                }
            }
            let expected = if k == 0 { ell + 1 } else { ell };
            if children != expected {
                return Err(Error::Internal(format!(
                    "node at level {k} has {children} children, expected {expected}"
                )));
            }
        }
        let level: Vec<LeftIdeal> = next.keys().cloned().collect();
        for (ci, child) in level.iter().enumerate() {
            links.push(((k, next[child]), (k + 1, ci)));
        }
        links.sort();
        edges.extend(links);
        levels.push(level);
    }
    Ok(IdealTree { root: o.clone(), ell, levels, edges })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum DegreeKind {
    Primitive,
    /// `I = kO`: multiplication by `k`.
    Scalar { k: String },
    /// `I ⊆ kO` for the given maximal `k`, but not equal to it.
    NonPrimitive { content: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyDegree {
    pub degree: Int,
    pub kind: DegreeKind,
}

/// Degree `nrd(I)²` of the isogeny attached to `I`.
pub fn isogeny_degree(i: &LeftIdeal) -> Result<IsogenyDegree> {
    let n = ideal_norm(i)?;
    let c = i.content();
    let kind = if c.is_one() {
        DegreeKind::Primitive
    } else if LeftIdeal::scalar(i.order().clone(), &c)? == *i {
        DegreeKind::Scalar { k: c.to_string() }
    } else {
        DegreeKind::NonPrimitive { content: c.to_string() }
    };
    Ok(IsogenyDegree { degree: &n * &n, kind })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IsomorphismReport {
    pub nodes: usize,
    pub ball_size: usize,
    pub bijective: bool,
    pub levels_match: bool,
    pub adjacency_preserved: bool,
    pub right_orders_match: bool,
    pub violations: Vec<String>,
}

impl IsomorphismReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares the ideal tree with the ball of the same radius around the
/// root through [`localize_ideal`].
pub fn tree_isomorphism_check(t: &IdealTree, seed: u64) -> Result<IsomorphismReport> {
    let ell = t.ell;
    let root = TreeVertex::root(ell);
    let disc = t.root.reduced_discriminant()?;
    let ids: Vec<NodeId> = t.node_ids().collect();
    let mut image: BTreeMap<NodeId, TreeVertex> = BTreeMap::new();
    let mut report = IsomorphismReport {
        nodes: ids.len(),
        bijective: true,
        levels_match: true,
        adjacency_preserved: true,
        right_orders_match: true,
        ..Default::default()
    };
    for &id in &ids {
        let node = t.node(id);
        let v = localize_ideal(node, ell, seed)?;
        if distance(&root, &v)? as usize != id.0 {
            report.levels_match = false;
            report.violations.push(format!("node {id:?} maps to {v} off its level"));
        }
        if node.right_order()?.reduced_discriminant()? != disc {
            report.right_orders_match = false;
            report.violations.push(format!("node {id:?} has a right order of another type"));
        }
        image.insert(id, v);
    }
    let targets: BTreeSet<TreeVertex> = ball(&root, t.depth()).into_iter().collect();
    report.ball_size = targets.len();
    let hit: BTreeSet<TreeVertex> = image.values().cloned().collect();
    if hit.len() != ids.len() || hit != targets {
        report.bijective = false;
        report.violations.push(format!(
            "{} nodes reach {} distinct vertices of a ball of size {}",
            ids.len(),
            hit.len(),
            targets.len()
        ));
    }
    let tree_edges: BTreeSet<(NodeId, NodeId)> = t.edges.iter().cloned().collect();
    for (a, &u) in ids.iter().enumerate() {
        for &w in &ids[a + 1..] {
            let linked = tree_edges.contains(&(u, w)) || tree_edges.contains(&(w, u));
            let adjacent = distance(&image[&u], &image[&w])? == 1;
            if linked != adjacent {
                report.adjacency_preserved = false;
                report.violations.push(format!(
                    "nodes {u:?} and {w:?}: containment edge {linked}, tree adjacency {adjacent}"
                ));
            }
            if linked {
                let (parent, child) = if u.0 < w.0 { (u, w) } else { (w, u) };
                if !t.node(parent).lattice().contains_lattice(t.node(child).lattice()) {
                    report.violations.push(format!("edge {parent:?} -> {child:?} is not a containment"));
                }
            }
        }
    }
    Ok(report)
}

/// `ℓ`-valuation of the norm of every node, by level.
pub fn level_norms(t: &IdealTree) -> Result<Vec<BTreeSet<Int>>> {
    t.levels
        .iter()
        .map(|l| l.iter().map(ideal_norm).collect::<Result<BTreeSet<_>>>())
        .collect()
}

impl IsogenyDegree {
    pub fn is_identity(&self) -> bool {
        self.degree.is_one() && self.kind == DegreeKind::Primitive
    }
}
