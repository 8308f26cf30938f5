//! Joint embeddings and their isomorphism types.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::ages::AgeSpec;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::structures::{canonical_form, canonical_labeling, CanonicalCode, Embedding, Structure};
use crate::unions::Unions;

/// Isomorphism type of a joint embedding: the canonical code of the union
/// expanded by one unary mark per part coordinate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternCode(pub CanonicalCode);

impl PatternCode {
    pub fn short_digest(&self) -> String {
        self.0.short_digest()
    }
}

impl fmt::Debug for PatternCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PatternCode({})", self.short_digest())
    }
}

impl fmt::Display for PatternCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.short_digest())
    }
}

/// Parts `(a, z¹, …)` embedded in a common union whose vertices are all
/// covered by some part image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointEmbedding {
    pub union: Structure,
    pub parts: Vec<Embedding>,
}

impl JointEmbedding {
    /// The source structure of part `i` (the substructure induced on its
    /// image, pulled back along the part map).
    pub fn source(&self, i: usize) -> Structure {
        self.union.restrict(self.parts[i].map())
    }

    /// Check union support and that every part is a well-formed injective
    /// map into the union.
    pub fn validate(&self) -> Result<()> {
        let n = self.union.size();
        let mut covered = vec![false; n];
        for (i, p) in self.parts.iter().enumerate() {
            let mut seen = vec![false; n];
            for &v in p.map() {
                if v >= n || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidInput(format!(
                        "part {i} is not an injective map into the union"
                    )));
                }
                covered[v] = true;
            }
        }
        if let Some(v) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidInput(format!(
                "union vertex {v} lies in no part image"
            )));
        }
        Ok(())
    }
}

fn marked_code(host: &Structure, parts: &[&[usize]]) -> CanonicalCode {
    let marks: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    canonical_form(&host.with_marks(&marks))
}

pub fn pattern_of(j: &JointEmbedding) -> Result<PatternCode> {
    j.validate()?;
    let parts: Vec<&[usize]> = j.parts.iter().map(|p| p.map()).collect();
    Ok(PatternCode(marked_code(&j.union, &parts)))
}

/// Pattern of the parts inside a larger host: the host is first restricted
/// to the union of the part images.
pub fn pattern_in_host(host: &Structure, parts: &[&[usize]]) -> PatternCode {
    let mut order: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    order.sort_unstable();
    order.dedup();
    let mut position = vec![usize::MAX; host.size()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let local: Vec<Vec<usize>> = parts
        .iter()
        .map(|p| p.iter().map(|&v| position[v]).collect())
        .collect();
    let refs: Vec<&[usize]> = local.iter().map(Vec::as_slice).collect();
    PatternCode(marked_code(&host.restrict(&order), &refs))
}

/// Relabel a union and its part maps canonically for the marked structure.
pub(crate) fn canonical_joint(union: &Structure, maps: &[Vec<usize>]) -> (PatternCode, JointEmbedding) {
    let marks: Vec<usize> = maps.iter().flat_map(|m| m.iter().copied()).collect();
    let (perm, code) = canonical_labeling(&union.with_marks(&marks));
    let joint = JointEmbedding {
        union: union.relabel(&perm),
        parts: maps
            .iter()
            .map(|m| Embedding(m.iter().map(|&v| perm[v]).collect()))
            .collect(),
    };
    (PatternCode(code), joint)
}

pub(crate) fn check_members(spec: &AgeSpec, labeled: &[(&str, &Structure)]) -> Result<()> {
    for (_, s) in labeled {
        spec.check_signature(s)?;
    }
    spec.require_members(labeled)
}

/// One joint embedding of `a` and `zs` per pattern, in canonical labeling,
/// ordered by pattern code.
pub fn joint_embeddings(
    spec: &AgeSpec,
    a: &Structure,
    zs: &[Structure],
    budget: &Budget,
) -> Result<Vec<(PatternCode, JointEmbedding)>> {
    let mut labeled = vec![("A", a)];
    labeled.extend(zs.iter().map(|z| ("Z", z)));
    check_members(spec, &labeled)?;
    let mut parts = vec![a];
    parts.extend(zs);
    let mut found: BTreeMap<PatternCode, JointEmbedding> = BTreeMap::new();
    Unions::new(spec, parts, budget).for_each::<()>(|union, maps| {
        let (code, joint) = canonical_joint(union, maps);
        found.entry(code).or_insert(joint);
        ControlFlow::Continue(())
    })?;
    Ok(found.into_iter().collect())
}

pub fn pattern_count(spec: &AgeSpec, a: &Structure, z: &Structure, budget: &Budget) -> Result<usize> {
    Ok(joint_embeddings(spec, a, std::slice::from_ref(z), budget)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(name: &str, a: &Structure, z: &Structure) -> usize {
        pattern_count(&AgeSpec::catalog(name).unwrap(), a, z, &Budget::default()).unwrap()
    }

    #[test]
    fn point_pairs() {
        let k1 = Structure::empty_graph(1);
        assert_eq!(count("graph", &k1, &k1), 3);
        assert_eq!(count("linear_order", &Structure::chain(1), &Structure::chain(1)), 3);
        assert_eq!(count("set", &Structure::pure_set(1), &Structure::pure_set(1)), 2);
    }

    #[test]
    fn point_against_two_chain() {
        assert_eq!(count("linear_order", &Structure::chain(2), &Structure::chain(1)), 5);
    }

    #[test]
    fn equal_and_edge_patterns_differ() {
        let k1 = Structure::empty_graph(1);
        let eq = JointEmbedding {
            union: k1.clone(),
            parts: vec![Embedding(vec![0]), Embedding(vec![0])],
        };
        let edge = JointEmbedding {
            union: Structure::complete_graph(2),
            parts: vec![Embedding(vec![0]), Embedding(vec![1])],
        };
        let non_edge = JointEmbedding {
            union: Structure::empty_graph(2),
            parts: vec![Embedding(vec![0]), Embedding(vec![1])],
        };
        let codes = [&eq, &edge, &non_edge].map(|j| pattern_of(j).unwrap());
        assert_ne!(codes[0], codes[1]);
        assert_ne!(codes[1], codes[2]);
        assert_ne!(codes[0], codes[2]);
    }

    #[test]
    fn order_direction_matters() {
        let below = JointEmbedding {
            union: Structure::chain(2),
            parts: vec![Embedding(vec![0]), Embedding(vec![1])],
        };
        let above = JointEmbedding {
            union: Structure::chain(2),
            parts: vec![Embedding(vec![1]), Embedding(vec![0])],
        };
        assert_ne!(pattern_of(&below).unwrap(), pattern_of(&above).unwrap());
    }

    #[test]
    fn uncovered_vertex_is_rejected() {
        let j = JointEmbedding {
            union: Structure::empty_graph(3),
            parts: vec![Embedding(vec![0]), Embedding(vec![1])],
        };
        assert!(pattern_of(&j).is_err());
    }

    #[test]
    fn pattern_in_host_ignores_other_vertices() {
        let host = Structure::chain(5);
        let p = pattern_in_host(&host, &[&[1], &[3]]);
        let j = JointEmbedding {
            union: Structure::chain(2),
            parts: vec![Embedding(vec![0]), Embedding(vec![1])],
        };
        assert_eq!(p, pattern_of(&j).unwrap());
    }

    #[test]
    fn non_members_are_rejected() {
        let spec = AgeSpec::catalog("graph_kfree:3").unwrap();
        let k3 = Structure::complete_graph(3);
        assert!(joint_embeddings(&spec, &k3, &[k3.clone()], &Budget::default()).is_err());
    }
}
