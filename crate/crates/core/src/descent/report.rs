use std::collections::BTreeMap;

use serde::Serialize;

use super::AdelicPoint;
use crate::center::Center;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DescentReport {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "D")]
    pub d: u64,
    pub centers: BTreeMap<u64, CenterJson>,
    pub point: PointJson,
    /// Twist of each generator.
    pub cocycle: BTreeMap<String, Vec<u64>>,
    pub group: GroupJson,
    pub checks: ChecksJson,
    pub minimality: Vec<MinimalityEntry>,
    pub relations_checked: bool,
    pub conventions: Conventions,
}

impl DescentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum CenterJson {
    Vertex { vertex: String },
    Edge { vertices: [String; 2] },
}

impl From<&Center> for CenterJson {
    fn from(c: &Center) -> Self {
        match c {
            Center::Vertex(v) => CenterJson::Vertex { vertex: v.to_string() },
            Center::Edge(u, w) => CenterJson::Edge { vertices: [u.to_string(), w.to_string()] },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeJson {
    pub origin: String,
    pub terminus: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PointJson {
    pub level: u64,
    pub edges: BTreeMap<u64, EdgeJson>,
    pub vertices: BTreeMap<u64, String>,
    pub orientations: BTreeMap<u64, String>,
    pub tau: String,
}

impl From<&AdelicPoint> for PointJson {
    fn from(q: &AdelicPoint) -> Self {
        PointJson {
            level: q.level,
            edges: q
                .edges
                .iter()
                .map(|(&l, e)| {
                    (l, EdgeJson { origin: e.origin().to_string(), terminus: e.terminus().to_string() })
                })
                .collect(),
            vertices: q.vertices.iter().map(|(&l, v)| (l, v.to_string())).collect(),
            orientations: q.orientations.iter().map(|(&l, o)| (l, o.to_string())).collect(),
            tau: q.tau.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupJson {
    pub order: usize,
    /// Twist of every element, keyed by a shortest word (`e` is the identity,
    /// `s*t` applies `t` first).
    pub elements: BTreeMap<String, Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChecksJson {
    pub homomorphism: bool,
    pub phi_tilde_injective: bool,
    pub minimality: bool,
    /// Informational: whether every local set is a single orbit.
    pub transitive: bool,
}

impl ChecksJson {
    pub fn passed(&self) -> bool {
        self.homomorphism && self.phi_tilde_injective && self.minimality
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MinimalityEntry {
    pub prime: u64,
    pub passed: bool,
    pub fixed_vertices: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Conventions {
    pub edge_origin: &'static str,
    pub default_orientation: &'static str,
    pub word_order: &'static str,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            edge_origin: "smaller canonical vertex",
            default_orientation: "+",
            word_order: "rightmost generator acts first",
        }
    }
}
