//! Scenario files: a finite group acting on finite sets of tree vertices
//! and on orientation bits at the ramified primes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use crate::arith::{factorize, is_prime};
use crate::bruhat_tits::{distance, TreeVertex};
use crate::error::{Error, Result};
use crate::Int;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub vertices: Vec<TreeVertex>,
    /// Generator name to image list (`vertices[i] ↦ vertices[perm[i]]`).
    pub action: BTreeMap<String, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisScenario {
    pub d: u64,
    pub generators: Vec<String>,
    pub relations_checked: bool,
    pub tau: String,
    pub local: BTreeMap<u64, LocalData>,
    /// Prime dividing `D` to the set of generators that flip its bit.
    pub ramified: BTreeMap<u64, BTreeSet<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(rename = "D")]
    d: u64,
    #[serde(default)]
    generators: Vec<String>,
    #[serde(default, rename = "relationsChecked")]
    relations_checked: bool,
    #[serde(default)]
    tau: Option<String>,
    #[serde(default)]
    local: BTreeMap<String, RawLocal>,
    #[serde(default)]
    ramified: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLocal {
    vertices: Vec<String>,
    #[serde(default)]
    action: BTreeMap<String, Vec<usize>>,
}

pub const DEFAULT_TAU: &str = "tau";

impl GaloisScenario {
    /// Parses and validates a scenario file. Syntax and schema problems are
    /// [`Error::Parse`]; semantic problems are [`Error::Scenario`].
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        let mut violations = Vec::new();
        let mut local = BTreeMap::new();
        for (key, data) in raw.local {
            let Some(ell) = parse_prime_key(&key, "local", &mut violations) else { continue };
            let mut vertices = Vec::with_capacity(data.vertices.len());
            for (n, v) in data.vertices.iter().enumerate() {
                match v.parse::<TreeVertex>() {
                    Ok(t) if t.ell() == ell => vertices.push(t),
                    Ok(t) => violations.push(format!(
                        "local.{key}.vertices[{n}]: vertex over {} in the block for {ell}",
                        t.ell()
                    )),
                    Err(e) => violations.push(format!("local.{key}.vertices[{n}]: {e}")),
                }
            }
            if vertices.len() == data.vertices.len() {
                local.insert(ell, LocalData { vertices, action: data.action });
            }
        }
        let mut ramified = BTreeMap::new();
        for (key, acts) in raw.ramified {
            let Some(ell) = parse_prime_key(&key, "ramified", &mut violations) else { continue };
            let mut flips = BTreeSet::new();
            for (g, what) in acts {
                match what.as_str() {
                    "flip" => {
                        flips.insert(g);
                    }
                    "fix" => {}
                    other => violations.push(format!(
                        "ramified.{key}.{g}: expected \"flip\" or \"fix\", found {other:?}"
                    )),
                }
            }
            ramified.insert(ell, flips);
        }
        let s = GaloisScenario {
            d: raw.d,
            generators: raw.generators,
            relations_checked: raw.relations_checked,
            tau: raw.tau.unwrap_or_else(|| DEFAULT_TAU.to_string()),
            local,
            ramified,
        };
        violations.extend(s.violations());
        if violations.is_empty() {
            Ok(s)
        } else {
            Err(Error::Scenario(violations))
        }
    }

    /// Every violated scenario invariant, empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let d = Int::from(self.d);
        let d_primes: Vec<u64> = match self.d {
            0 => {
                out.push("D must be positive".into());
                Vec::new()
            }
            _ => {
                let f = factorize(&d);
                if f.iter().any(|&(_, e)| e > 1) {
                    out.push(format!("D = {} is not squarefree", self.d));
                }
                if f.len() % 2 == 1 {
                    out.push(format!("D = {} has an odd number of prime factors", self.d));
                }
                f.into_iter().map(|(p, _)| p).collect()
            }
        };
        let mut names = BTreeSet::new();
        for g in &self.generators {
            if g.is_empty() || g.contains('*') || g == "e" {
                out.push(format!("generator name {g:?} is reserved or empty"));
            }
            if !names.insert(g) {
                out.push(format!("generator {g:?} is listed twice"));
            }
        }
        for (&ell, data) in &self.local {
            if d_primes.contains(&ell) {
                out.push(format!("local.{ell}: prime divides D"));
            }
            if data.vertices.is_empty() {
                out.push(format!("local.{ell}: empty vertex set"));
                continue;
            }
            let distinct: BTreeSet<&TreeVertex> = data.vertices.iter().collect();
            if distinct.len() != data.vertices.len() {
                out.push(format!("local.{ell}: repeated vertex"));
            }
            for (g, perm) in &data.action {
                if !names.contains(g) {
                    out.push(format!("local.{ell}.action: unknown generator {g:?}"));
                    continue;
                }
                out.extend(check_isometry(ell, g, &data.vertices, perm));
            }
        }
        for (ell, flips) in &self.ramified {
            if !d_primes.contains(ell) {
                out.push(format!("ramified.{ell}: prime does not divide D"));
            }
            for g in flips {
                if !names.contains(g) {
                    out.push(format!("ramified.{ell}: unknown generator {g:?}"));
                }
            }
        }
        out
    }

    /// Primes dividing `D`.
    pub fn d_primes(&self) -> Vec<u64> {
        factorize(&Int::from(self.d)).into_iter().map(|(p, _)| p).collect()
    }

    /// Image list of generator `g` on `S_ℓ`, the identity when unspecified.
    pub fn local_action(&self, ell: u64, g: &str) -> Vec<usize> {
        let data = &self.local[&ell];
        data.action
            .get(g)
            .cloned()
            .unwrap_or_else(|| (0..data.vertices.len()).collect())
    }

    pub fn flips(&self, ell: u64, g: &str) -> bool {
        self.ramified.get(&ell).is_some_and(|f| f.contains(g))
    }
}

fn parse_prime_key(key: &str, block: &str, violations: &mut Vec<String>) -> Option<u64> {
    match key.parse::<u64>() {
        Ok(p) if is_prime(p) => Some(p),
        _ => {
            violations.push(format!("{block}: key {key:?} is not a prime"));
            None
        }
    }
}

fn check_isometry(ell: u64, g: &str, vertices: &[TreeVertex], perm: &[usize]) -> Vec<String> {
    let n = vertices.len();
    if perm.len() != n {
        return vec![format!(
            "local.{ell}.action.{g}: {} images for {n} vertices",
            perm.len()
        )];
    }
    let images: BTreeSet<usize> = perm.iter().copied().collect();
    if images.len() != n || perm.iter().any(|&i| i >= n) {
        return vec![format!("local.{ell}.action.{g}: {perm:?} is not a permutation")];
    }
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let before = distance(&vertices[a], &vertices[b]).expect("same prime");
            let after = distance(&vertices[perm[a]], &vertices[perm[b]]).expect("same prime");
            if before != after {
                out.push(format!(
                    "local.{ell}.action.{g}: not an isometry, d({}, {}) = {before} but d({}, {}) = {after}",
                    vertices[a], vertices[b], vertices[perm[a]], vertices[perm[b]]
                ));
                return out;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_and_semantic_errors() {
        assert!(matches!(GaloisScenario::from_json("{"), Err(Error::Parse(_))));
        assert!(matches!(
            GaloisScenario::from_json(r#"{"D": 6, "bogus": 1}"#),
            Err(Error::Parse(_))
        ));
        let Err(Error::Scenario(v)) = GaloisScenario::from_json(r#"{"D": 12}"#) else {
            panic!("expected a validation error")
        };
        assert!(v[0].contains("squarefree"));
        let Err(Error::Scenario(v)) = GaloisScenario::from_json(
            r#"{"D": 6, "generators": ["s"], "local": {"5": {"vertices":
                ["5:[[1,0],[0,1]]", "5:[[5,0],[0,1]]", "5:[[25,0],[0,1]]"],
                "action": {"s": [1, 0, 2]}}}}"#,
        ) else {
            panic!("expected a validation error")
        };
        assert!(v[0].contains("not an isometry"), "{v:?}");
        let ok = GaloisScenario::from_json(r#"{"D": 1}"#).unwrap();
        assert_eq!(ok.tau, DEFAULT_TAU);
    }
}
