//! Depth-bounded search for unstable (A, Z)-sequences.

use std::collections::HashSet;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ages::AgeSpec;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::patterns::{check_members, joint_embeddings, pattern_in_host, PatternCode};
use crate::structures::{canonical_form, is_embedding, CanonicalCode, Embedding, Structure};
use crate::unions::Unions;

/// Sequences `a_1..a_n`, `z_1..z_n` in one host with
/// `[a_m, z_k] = tau_lt` for `m < k` and `[a_m, z_k] = tau_gt` for `m > k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnstableWitness {
    pub depth: usize,
    pub host: Structure,
    pub a_parts: Vec<Embedding>,
    pub z_parts: Vec<Embedding>,
    pub tau_lt: PatternCode,
    pub tau_gt: PatternCode,
}

impl UnstableWitness {
    /// Re-check every constraint from scratch.
    pub fn verify(&self, spec: &AgeSpec, a: &Structure, z: &Structure) -> Result<(), String> {
        if self.depth < 2 {
            return Err("depth below 2".into());
        }
        if self.a_parts.len() != self.depth || self.z_parts.len() != self.depth {
            return Err("part counts differ from the depth".into());
        }
        if self.tau_lt == self.tau_gt {
            return Err("the two patterns coincide".into());
        }
        if spec.check_signature(&self.host).is_err() || !spec.member_unchecked(&self.host) {
            return Err("host is not in the age".into());
        }
        for (i, p) in self.a_parts.iter().enumerate() {
            if !is_embedding(p.map(), a, &self.host) {
                return Err(format!("a_{} is not an embedding of A", i + 1));
            }
        }
        for (i, p) in self.z_parts.iter().enumerate() {
            if !is_embedding(p.map(), z, &self.host) {
                return Err(format!("z_{} is not an embedding of Z", i + 1));
            }
        }
        for (m, am) in self.a_parts.iter().enumerate() {
            for (k, zk) in self.z_parts.iter().enumerate() {
                let want = match m.cmp(&k) {
                    std::cmp::Ordering::Less => &self.tau_lt,
                    std::cmp::Ordering::Greater => &self.tau_gt,
                    std::cmp::Ordering::Equal => continue,
                };
                if &pattern_in_host(&self.host, &[am.map(), zk.map()]) != want {
                    return Err(format!("[a_{}, z_{}] has the wrong pattern", m + 1, k + 1));
                }
            }
        }
        Ok(())
    }

    /// Keep the first `depth` parts; the host shrinks to their images.
    pub fn truncate(&self, depth: usize) -> Result<UnstableWitness> {
        if depth < 2 || depth > self.depth {
            return Err(Error::InvalidInput(format!(
                "cannot truncate a depth-{} witness to depth {depth}",
                self.depth
            )));
        }
        let kept = self.a_parts[..depth].iter().chain(&self.z_parts[..depth]);
        let mut order: Vec<usize> = kept.flat_map(|p| p.map().iter().copied()).collect();
        order.sort_unstable();
        order.dedup();
        let mut position = vec![usize::MAX; self.host.size()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let remap = |p: &Embedding| Embedding(p.map().iter().map(|&v| position[v]).collect());
        Ok(UnstableWitness {
            depth,
            host: self.host.restrict(&order),
            a_parts: self.a_parts[..depth].iter().map(remap).collect(),
            z_parts: self.z_parts[..depth].iter().map(remap).collect(),
            tau_lt: self.tau_lt.clone(),
            tau_gt: self.tau_gt.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// True when no witness exists within the bounds; never a claim about
    /// unbounded depth.
    pub stable_up_to_depth: bool,
    pub depth: usize,
    pub max_host: usize,
    pub pattern_count: usize,
    pub pattern_pairs: usize,
    pub witness: Option<UnstableWitness>,
}

pub fn unstable_witness(
    spec: &AgeSpec,
    a: &Structure,
    z: &Structure,
    depth: usize,
    max_host: usize,
    budget: &Budget,
) -> Result<Option<UnstableWitness>> {
    Ok(stable_up_to(spec, a, z, depth, max_host, budget)?.witness)
}

pub fn stable_up_to(
    spec: &AgeSpec,
    a: &Structure,
    z: &Structure,
    depth: usize,
    max_host: usize,
    budget: &Budget,
) -> Result<StabilityReport> {
    if depth < 2 {
        return Err(Error::InvalidInput(
            "depth must be at least 2 (depth 1 has no off-diagonal pair)".into(),
        ));
    }
    check_members(spec, &[("A", a), ("Z", z)])?;
    let patterns: Vec<PatternCode> = joint_embeddings(spec, a, std::slice::from_ref(z), budget)?
        .into_iter()
        .map(|(code, _)| code)
        .collect();
    let mut pairs = Vec::new();
    for lt in &patterns {
        for gt in &patterns {
            if lt != gt {
                pairs.push((lt, gt));
            }
        }
    }
    let found = pairs
        .par_iter()
        .map(|&(lt, gt)| {
            let search = Search {
                spec,
                a,
                z,
                depth,
                max_host,
                budget,
                tau_lt: lt,
                tau_gt: gt,
            };
            search.run()
        })
        .find_first(|r| !matches!(r, Ok(None)));
    let witness = match found {
        Some(r) => r?,
        None => None,
    };
    Ok(StabilityReport {
        stable_up_to_depth: witness.is_none(),
        depth,
        max_host,
        pattern_count: patterns.len(),
        pattern_pairs: pairs.len(),
        witness,
    })
}

struct Search<'a> {
    spec: &'a AgeSpec,
    a: &'a Structure,
    z: &'a Structure,
    depth: usize,
    max_host: usize,
    budget: &'a Budget,
    tau_lt: &'a PatternCode,
    tau_gt: &'a PatternCode,
}

struct State {
    host: Structure,
    /// Placement order: a_1, z_1, a_2, z_2, ...
    placed: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&self) -> Result<Option<UnstableWitness>> {
        if self.a.size() > self.max_host {
            return Ok(None);
        }
        let start = State {
            host: self.a.clone(),
            placed: vec![(0..self.a.size()).collect()],
        };
        let mut seen = vec![HashSet::new(); 2 * self.depth + 1];
        Ok(self.place(start, &mut seen)?.map(|s| {
            let (mut a_parts, mut z_parts) = (Vec::new(), Vec::new());
            for (i, p) in s.placed.into_iter().enumerate() {
                if i % 2 == 0 {
                    a_parts.push(Embedding(p));
                } else {
                    z_parts.push(Embedding(p));
                }
            }
            UnstableWitness {
                depth: self.depth,
                host: s.host,
                a_parts,
                z_parts,
                tau_lt: self.tau_lt.clone(),
                tau_gt: self.tau_gt.clone(),
            }
        }))
    }

    /// Marked host code, the memo key for a partial placement.
    fn key(&self, host: &Structure, placed: &[Vec<usize>]) -> CanonicalCode {
        let marks: Vec<usize> = placed.iter().flat_map(|p| p.iter().copied()).collect();
        canonical_form(&host.with_marks(&marks))
    }

    /// Do the constraints involving the newest part hold?
    fn consistent(&self, host: &Structure, placed: &[Vec<usize>]) -> bool {
        let step = placed.len() - 1;
        let newest = &placed[step];
        let k = step / 2;
        if step % 2 == 0 {
            // a_k against every earlier z_j, j < k
            (0..k).all(|j| pattern_in_host(host, &[newest, &placed[2 * j + 1]]) == *self.tau_gt)
        } else {
            // z_k against every earlier a_m, m < k
            (0..k).all(|m| pattern_in_host(host, &[&placed[2 * m], newest]) == *self.tau_lt)
        }
    }

    fn place(&self, state: State, seen: &mut [HashSet<CanonicalCode>]) -> Result<Option<State>> {
        let step = state.placed.len();
        if step == 2 * self.depth {
            return Ok(Some(state));
        }
        let part = if step % 2 == 0 { self.a } else { self.z };
        let mut unions = Unions::new(self.spec, vec![&state.host, part], self.budget);
        unions.max_size = self.max_host;
        let mut children = Vec::new();
        unions.for_each::<()>(|host, maps| {
            let mut placed = state.placed.clone();
            placed.push(maps[1].clone());
            if self.consistent(host, &placed) {
                children.push((host.clone(), placed));
            }
            ControlFlow::Continue(())
        })?;
        for (host, placed) in children {
            self.budget.charge(1)?;
            if !seen[step + 1].insert(self.key(&host, &placed)) {
                continue;
            }
            if let Some(done) = self.place(State { host, placed }, seen)? {
                return Ok(Some(done));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(name: &str, a: &Structure, z: &Structure, depth: usize) -> StabilityReport {
        let spec = AgeSpec::catalog(name).unwrap();
        let host = depth * (a.size() + z.size());
        stable_up_to(&spec, a, z, depth, host, &Budget::default()).unwrap()
    }

    #[test]
    fn orders_are_unstable() {
        let pt = Structure::chain(1);
        let r = run("linear_order", &pt, &pt, 4);
        let w = r.witness.unwrap();
        let spec = AgeSpec::catalog("linear_order").unwrap();
        assert_eq!(w.verify(&spec, &pt, &pt), Ok(()));
        for d in 2..4 {
            assert_eq!(w.truncate(d).unwrap().verify(&spec, &pt, &pt), Ok(()));
        }
    }

    #[test]
    fn graphs_contain_half_graphs() {
        let k1 = Structure::empty_graph(1);
        let spec = AgeSpec::catalog("graph").unwrap();
        let w = run("graph", &k1, &k1, 4).witness.unwrap();
        assert_eq!(w.verify(&spec, &k1, &k1), Ok(()));
    }

    #[test]
    fn pure_points_are_unstable_only_at_depth_three() {
        let pt = Structure::pure_set(1);
        assert!(!run("set", &pt, &pt, 3).stable_up_to_depth);
        assert!(run("set", &pt, &pt, 4).stable_up_to_depth);
    }

    #[test]
    fn single_pattern_is_stable() {
        // the age of one-point sets has only the equality pattern
        let spec = AgeSpec::new(
            crate::structures::Signature::empty(),
            vec![],
            vec![Structure::pure_set(2)],
            None,
        )
        .unwrap();
        let pt = Structure::pure_set(1);
        let r = stable_up_to(&spec, &pt, &pt, 5, 10, &Budget::default()).unwrap();
        assert_eq!(r.pattern_count, 1);
        assert!(r.stable_up_to_depth);
    }

    #[test]
    fn depth_six_witnesses() {
        let pt = Structure::chain(1);
        let k1 = Structure::empty_graph(1);
        for (name, p) in [("linear_order", &pt), ("graph", &k1)] {
            let spec = AgeSpec::catalog(name).unwrap();
            let w = run(name, p, p, 6).witness.unwrap();
            for d in 2..=6 {
                assert_eq!(w.truncate(d).unwrap().verify(&spec, p, p), Ok(()));
            }
        }
    }

    #[test]
    fn depth_one_is_rejected() {
        let spec = AgeSpec::catalog("set").unwrap();
        let pt = Structure::pure_set(1);
        assert!(stable_up_to(&spec, &pt, &pt, 1, 4, &Budget::default()).is_err());
    }

    #[test]
    fn tampered_witness_fails() {
        let pt = Structure::chain(1);
        let spec = AgeSpec::catalog("linear_order").unwrap();
        let mut w = run("linear_order", &pt, &pt, 3).witness.unwrap();
        w.a_parts.swap(0, 2);
        assert!(w.verify(&spec, &pt, &pt).is_err());
    }
}
