use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::{CopySystem, Verdict};
use crate::ages::AgeSpec;
use crate::budget::Budget;
use crate::error::Result;
use crate::patterns::{check_members, joint_embeddings, pattern_in_host, pattern_of, JointEmbedding, PatternCode};
use crate::stability::{stable_up_to, StabilityReport};
use crate::structures::{embeddings, is_embedding, Embedding, Structure};
use crate::unions::Unions;

/// One joint embedding of `C` with the `Z`s and the copy of `B` inside `C`
/// chosen for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinableChoice {
    pub pattern: PatternCode,
    pub joint: JointEmbedding,
    /// An embedding of `B` into `C`; absent when no copy works.
    pub b: Option<Embedding>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinableOutcome {
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub pattern_count: usize,
    pub choices: Vec<DefinableChoice>,
    /// First joint embedding with no pattern-constant copy of `B`.
    pub offending: Option<JointEmbedding>,
    pub depth: Option<usize>,
    pub stability: Vec<StabilityReport>,
}

/// `C → (B)^A_Z`: for every joint embedding `⟨c, z⟩` some `b` makes
/// `a ↦ [c∘b∘a, z]` constant.
pub fn definable_arrow(
    spec: &AgeSpec,
    c: &Structure,
    a: &Structure,
    b: &Structure,
    z: &Structure,
    budget: &Budget,
) -> Result<DefinableOutcome> {
    definable_core(spec, c, a, b, std::slice::from_ref(z), budget)
}

/// The definable arrow for several `Z`s at once, provided every pair
/// `(A, Z_i)` has no unstable sequence up to `depth`.
pub fn stable_arrow(
    spec: &AgeSpec,
    c: &Structure,
    a: &Structure,
    b: &Structure,
    zs: &[Structure],
    depth: usize,
    budget: &Budget,
) -> Result<DefinableOutcome> {
    let mut labeled = vec![("C", c), ("A", a), ("B", b)];
    labeled.extend(zs.iter().map(|z| ("Z", z)));
    check_members(spec, &labeled)?;
    let mut reports = Vec::new();
    for (i, z) in zs.iter().enumerate() {
        let report = stable_up_to(spec, a, z, depth, depth * (a.size() + z.size()), budget)?;
        let unstable = !report.stable_up_to_depth;
        reports.push(report);
        if unstable {
            return Ok(DefinableOutcome {
                verdict: Verdict::PreconditionFailed,
                reason: Some(format!("(A, Z{}) has an unstable sequence of depth {depth}", i + 1)),
                pattern_count: 0,
                choices: vec![],
                offending: None,
                depth: Some(depth),
                stability: reports,
            });
        }
    }
    let mut out = definable_core(spec, c, a, b, zs, budget)?;
    out.depth = Some(depth);
    out.stability = reports;
    Ok(out)
}

/// Patterns `[c∘x, z_i]` for every `x` in `domain`, one vector per `x`.
fn pattern_keys(joint: &JointEmbedding, domain: &[Embedding]) -> Vec<Vec<PatternCode>> {
    let cpart = &joint.parts[0];
    domain
        .iter()
        .map(|x| {
            let image = cpart.compose(x);
            joint.parts[1..]
                .iter()
                .map(|z| pattern_in_host(&joint.union, &[image.map(), z.map()]))
                .collect()
        })
        .collect()
}

fn constant_copy(sys: &CopySystem, keys: &[Vec<PatternCode>]) -> Option<Embedding> {
    sys.copies
        .iter()
        .zip(&sys.sets)
        .find(|(_, set)| set.iter().all(|&i| keys[i] == keys[set[0]]))
        .map(|(copy, _)| copy.clone())
}

fn definable_core(
    spec: &AgeSpec,
    c: &Structure,
    a: &Structure,
    b: &Structure,
    zs: &[Structure],
    budget: &Budget,
) -> Result<DefinableOutcome> {
    let mut labeled = vec![("C", c), ("A", a), ("B", b)];
    labeled.extend(zs.iter().map(|z| ("Z", z)));
    check_members(spec, &labeled)?;
    let sys = CopySystem::new(a, b, c)?;
    let mut out = DefinableOutcome {
        verdict: Verdict::Holds,
        reason: None,
        pattern_count: 0,
        choices: vec![],
        offending: None,
        depth: None,
        stability: vec![],
    };
    if sys.copies.is_empty() {
        out.verdict = Verdict::Fails;
        out.reason = Some("no copy of B".into());
        return Ok(out);
    }
    if sys.inner.is_empty() {
        out.verdict = Verdict::DegenerateHolds;
        out.reason = Some("A does not embed in B".into());
        return Ok(out);
    }
    let joints = joint_embeddings(spec, c, zs, budget)?;
    out.pattern_count = joints.len();
    for (pattern, joint) in joints {
        budget.charge(1)?;
        let keys = pattern_keys(&joint, &sys.domain);
        let chosen = constant_copy(&sys, &keys);
        if chosen.is_none() && out.offending.is_none() {
            out.verdict = Verdict::Fails;
            out.offending = Some(joint.clone());
        }
        out.choices.push(DefinableChoice {
            pattern,
            joint,
            b: chosen,
        });
    }
    Ok(out)
}

/// Independent re-check of a definable or stable arrow outcome.
pub fn verify_definable(
    spec: &AgeSpec,
    c: &Structure,
    a: &Structure,
    b: &Structure,
    zs: &[Structure],
    outcome: &DefinableOutcome,
    budget: &Budget,
) -> Result<(), String> {
    let copies = embeddings(b, c).map_err(|e| e.to_string())?;
    let inner = embeddings(a, b).map_err(|e| e.to_string())?;
    let valid_joint = |j: &JointEmbedding| -> Result<(), String> {
        j.validate().map_err(|e| e.to_string())?;
        if j.parts.len() != zs.len() + 1 {
            return Err("joint embedding has the wrong number of parts".into());
        }
        if !spec.member(&j.union).unwrap_or(false) {
            return Err("union is not in the age".into());
        }
        if !is_embedding(j.parts[0].map(), c, &j.union) {
            return Err("first part is not an embedding of C".into());
        }
        for (z, p) in zs.iter().zip(&j.parts[1..]) {
            if !is_embedding(p.map(), z, &j.union) {
                return Err("a part is not an embedding of its Z".into());
            }
        }
        Ok(())
    };
    let keys_of = |j: &JointEmbedding, x: &Embedding| -> Vec<PatternCode> {
        let image = j.parts[0].compose(x);
        j.parts[1..]
            .iter()
            .map(|z| {
                let sub = JointEmbedding {
                    union: j.union.clone(),
                    parts: vec![image.clone(), z.clone()],
                };
                restricted_pattern(&sub)
            })
            .collect()
    };
    let constant_on = |j: &JointEmbedding, copy: &Embedding| {
        let first = keys_of(j, &copy.compose(&inner[0]));
        inner.iter().all(|x| keys_of(j, &copy.compose(x)) == first)
    };
    match outcome.verdict {
        Verdict::PreconditionFailed => {
            for (z, report) in zs.iter().zip(&outcome.stability) {
                if let Some(w) = &report.witness {
                    return w.verify(spec, a, z).map_err(|e| format!("stability witness: {e}"));
                }
            }
            Err("no unstable witness recorded".into())
        }
        Verdict::DegenerateHolds => {
            if inner.is_empty() && !copies.is_empty() {
                Ok(())
            } else {
                Err("outcome is not degenerate".into())
            }
        }
        Verdict::Fails if outcome.reason.as_deref() == Some("no copy of B") => {
            if copies.is_empty() {
                Ok(())
            } else {
                Err("B does embed in C".into())
            }
        }
        Verdict::Fails => {
            let j = outcome.offending.as_ref().ok_or("missing offending joint embedding")?;
            valid_joint(j)?;
            if copies.iter().any(|copy| constant_on(j, copy)) {
                return Err("the offending joint embedding has a constant copy".into());
            }
            Ok(())
        }
        Verdict::Holds => {
            if copies.is_empty() || inner.is_empty() {
                return Err("holds without a copy of B or an embedding of A in B".into());
            }
            let mut covered = BTreeSet::new();
            for choice in &outcome.choices {
                valid_joint(&choice.joint)?;
                let copy = choice.b.as_ref().ok_or("a joint embedding has no chosen copy")?;
                if !is_embedding(copy.map(), b, c) {
                    return Err("a chosen copy is not an embedding of B into C".into());
                }
                if !constant_on(&choice.joint, copy) {
                    return Err("a chosen copy is not pattern-constant".into());
                }
                covered.insert(pattern_of(&choice.joint).map_err(|e| e.to_string())?);
            }
            let mut parts = vec![c];
            parts.extend(zs);
            let all = brute_force_patterns(spec, &parts, budget).map_err(|e| e.to_string())?;
            match all.iter().find(|p| !covered.contains(*p)) {
                Some(p) => Err(format!("pattern {p} has no recorded choice")),
                None => Ok(()),
            }
        }
    }
}

/// Pattern of a two-part joint embedding inside a larger union, computed by
/// restricting the union to the part images.
fn restricted_pattern(j: &JointEmbedding) -> PatternCode {
    let mut order: Vec<usize> = j.parts.iter().flat_map(|p| p.map().iter().copied()).collect();
    order.sort_unstable();
    order.dedup();
    let union = j.union.induced_substructure(&order).expect("nonempty parts");
    let relabel = |p: &Embedding| Embedding(p.map().iter().map(|v| order.binary_search(v).unwrap()).collect());
    pattern_of(&JointEmbedding {
        union,
        parts: j.parts.iter().map(relabel).collect(),
    })
    .expect("restricted joint embedding is union-supported")
}

/// Every pattern of joint embeddings of `parts`, by naive enumeration: the
/// first part is placed on `0..|P_0|`, the others by arbitrary injective
/// maps, and every tuple outside the part images is tried both ways.
pub(crate) fn brute_force_patterns(
    spec: &AgeSpec,
    parts: &[&Structure],
    budget: &Budget,
) -> Result<BTreeSet<PatternCode>> {
    let first = parts[0].size();
    let total: usize = parts.iter().map(|p| p.size()).sum();
    let mut out = BTreeSet::new();
    for n in first..=total {
        let mut maps: Vec<Vec<usize>> = vec![(0..first).collect()];
        place(spec, parts, n, &mut maps, &mut out, budget)?;
    }
    Ok(out)
}

fn place(
    spec: &AgeSpec,
    parts: &[&Structure],
    n: usize,
    maps: &mut Vec<Vec<usize>>,
    out: &mut BTreeSet<PatternCode>,
    budget: &Budget,
) -> Result<()> {
    if maps.len() == parts.len() {
        let mut covered = vec![false; n];
        for m in maps.iter() {
            for &v in m {
                covered[v] = true;
            }
        }
        if covered.iter().all(|&c| c) {
            complete(spec, parts, n, maps, out, budget)?;
        }
        return Ok(());
    }
    let size = parts[maps.len()].size();
    let mut current = Vec::with_capacity(size);
    injective(n, size, &mut current, &mut |m| {
        maps.push(m.to_vec());
        let r = place(spec, parts, n, maps, out, budget);
        maps.pop();
        r
    })
}

fn injective(
    n: usize,
    len: usize,
    current: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if current.len() == len {
        return f(current);
    }
    for v in 0..n {
        if !current.contains(&v) {
            current.push(v);
            injective(n, len, current, f)?;
            current.pop();
        }
    }
    Ok(())
}

fn complete(
    spec: &AgeSpec,
    parts: &[&Structure],
    n: usize,
    maps: &[Vec<usize>],
    out: &mut BTreeSet<PatternCode>,
    budget: &Budget,
) -> Result<()> {
    let sig = spec.signature();
    let mut fixed: Vec<Vec<Vec<usize>>> = vec![Vec::new(); sig.len()];
    let mut free: Vec<(usize, Vec<usize>)> = Vec::new();
    for (rel, sym) in sig.symbols().iter().enumerate() {
        let mut t = vec![0; sym.arity];
        loop {
            let mut inside = false;
            for (part, map) in parts.iter().zip(maps) {
                let pre: Option<Vec<usize>> = t.iter().map(|v| map.iter().position(|x| x == v)).collect();
                if let Some(pre) = pre {
                    if inside {
                        // covered twice: both parts must agree
                        let has = fixed[rel].contains(&t);
                        if has != part.holds(rel, &pre) {
                            return Ok(());
                        }
                    } else if part.holds(rel, &pre) {
                        fixed[rel].push(t.clone());
                    }
                    inside = true;
                }
            }
            if !inside {
                free.push((rel, t.clone()));
            }
            let mut i = t.len();
            while i > 0 {
                i -= 1;
                t[i] += 1;
                if t[i] < n {
                    break;
                }
                t[i] = 0;
            }
            if t.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    let count = 1u128.checked_shl(free.len() as u32).unwrap_or(u128::MAX);
    budget.check_candidates("brute-force completions", count)?;
    for mask in 0..count as u64 {
        budget.charge(1)?;
        let mut rels = fixed.clone();
        for (i, (rel, t)) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rels[*rel].push(t.clone());
            }
        }
        let union = Structure::new(spec.signature().clone(), n, rels)?;
        if !spec.member(&union)? {
            continue;
        }
        let joint = JointEmbedding {
            union,
            parts: maps.iter().map(|m| Embedding(m.clone())).collect(),
        };
        if maps
            .iter()
            .zip(parts)
            .all(|(m, p)| is_embedding(m, p, &joint.union))
        {
            out.insert(pattern_of(&joint)?);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoelckeOutcome {
    pub witness: Option<JointEmbedding>,
    /// The constant pattern `[b∘a, z]`.
    pub pattern: Option<PatternCode>,
    pub max_size: usize,
    pub unions_checked: u64,
}

/// First union of `B` and `Z` (free join first) on which `a ↦ [b∘a, z]` is
/// constant over `embeddings(A, B)`.
pub fn roelcke_witness(
    spec: &AgeSpec,
    a: &Structure,
    b: &Structure,
    z: &Structure,
    max_n: usize,
    budget: &Budget,
) -> Result<RoelckeOutcome> {
    check_members(spec, &[("A", a), ("B", b), ("Z", z)])?;
    let inner = embeddings(a, b)?;
    let max_size = (b.size() + z.size()).min(max_n);
    let mut unions = Unions::new(spec, vec![b, z], budget);
    unions.max_size = max_size;
    let mut checked = 0u64;
    let found = unions.for_each(|union, maps| {
        checked += 1;
        let pats: Vec<PatternCode> = inner
            .iter()
            .map(|x| {
                let image: Vec<usize> = x.map().iter().map(|&v| maps[0][v]).collect();
                pattern_in_host(union, &[&image, &maps[1]])
            })
            .collect();
        if pats.windows(2).all(|w| w[0] == w[1]) {
            ControlFlow::Break((
                JointEmbedding {
                    union: union.clone(),
                    parts: vec![Embedding(maps[0].clone()), Embedding(maps[1].clone())],
                },
                pats.into_iter().next(),
            ))
        } else {
            ControlFlow::Continue(())
        }
    })?;
    let (witness, pattern) = match found {
        Some((w, p)) => (Some(w), p),
        None => (None, None),
    };
    Ok(RoelckeOutcome {
        witness,
        pattern,
        max_size,
        unions_checked: checked,
    })
}

/// Check a claimed Roelcke witness directly.
pub fn roelcke_valid(
    spec: &AgeSpec,
    a: &Structure,
    b: &Structure,
    z: &Structure,
    j: &JointEmbedding,
) -> Result<(), String> {
    j.validate().map_err(|e| e.to_string())?;
    if j.parts.len() != 2 {
        return Err("a Roelcke witness has exactly two parts".into());
    }
    if !spec.member(&j.union).map_err(|e| e.to_string())? {
        return Err("union is not in the age".into());
    }
    if !is_embedding(j.parts[0].map(), b, &j.union) || !is_embedding(j.parts[1].map(), z, &j.union) {
        return Err("parts are not embeddings of B and Z".into());
    }
    let inner = embeddings(a, b).map_err(|e| e.to_string())?;
    let pats: Vec<PatternCode> = inner
        .iter()
        .map(|x| {
            restricted_pattern(&JointEmbedding {
                union: j.union.clone(),
                parts: vec![j.parts[0].compose(x), j.parts[1].clone()],
            })
        })
        .collect();
    if pats.windows(2).all(|w| w[0] == w[1]) {
        Ok(())
    } else {
        Err("the pattern a ↦ [b∘a, z] is not constant".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn pure_sets_with_room_for_b() {
        let spec = AgeSpec::catalog("set").unwrap();
        let (a, bb, z) = (Structure::pure_set(1), Structure::pure_set(2), Structure::pure_set(2));
        let c = Structure::pure_set(4);
        let out = definable_arrow(&spec, &c, &a, &bb, &z, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Holds);
        assert_eq!(verify_definable(&spec, &c, &a, &bb, &[z.clone()], &out, &b()), Ok(()));
        // with one point less a joint embedding can meet every copy of B
        let c3 = Structure::pure_set(3);
        let out = definable_arrow(&spec, &c3, &a, &bb, &z, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Fails);
        assert_eq!(verify_definable(&spec, &c3, &a, &bb, &[z], &out, &b()), Ok(()));
    }

    #[test]
    fn k4_arrows_edges_over_points() {
        let spec = AgeSpec::catalog("graph").unwrap();
        let k1 = Structure::empty_graph(1);
        let (c, bb) = (Structure::complete_graph(4), Structure::complete_graph(2));
        let out = definable_arrow(&spec, &c, &k1, &bb, &k1, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Holds);
        assert_eq!(verify_definable(&spec, &c, &k1, &bb, &[k1.clone()], &out, &b()), Ok(()));
        // K3 holds by pigeonhole; in K2 a point adjacent to one end splits
        // the only edge
        let k3 = Structure::complete_graph(3);
        let out = definable_arrow(&spec, &k3, &k1, &bb, &k1, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Holds);
        let out = definable_arrow(&spec, &bb, &k1, &bb, &k1, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Fails);
        assert_eq!(verify_definable(&spec, &bb, &k1, &bb, &[k1.clone()], &out, &b()), Ok(()));
    }

    #[test]
    fn stable_arrow_cases() {
        let spec = AgeSpec::catalog("set").unwrap();
        let pt = Structure::pure_set(1);
        let out = stable_arrow(&spec, &Structure::pure_set(3), &pt, &Structure::pure_set(2), &[pt.clone()], 4, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Holds);
        let orders = AgeSpec::catalog("linear_order").unwrap();
        let p = Structure::chain(1);
        let out = stable_arrow(&orders, &Structure::chain(3), &p, &Structure::chain(2), &[p.clone()], 4, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::PreconditionFailed);
        assert_eq!(
            verify_definable(&orders, &Structure::chain(3), &p, &Structure::chain(2), &[p.clone()], &out, &b()),
            Ok(())
        );
        let out = stable_arrow(&orders, &Structure::chain(2), &p, &Structure::chain(2), &[], 4, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Holds);
    }

    #[test]
    fn roelcke_in_orders() {
        let spec = AgeSpec::catalog("linear_order").unwrap();
        let (a, bb, z) = (Structure::chain(1), Structure::chain(2), Structure::chain(1));
        let out = roelcke_witness(&spec, &a, &bb, &z, 3, &b()).unwrap();
        let w = out.witness.unwrap();
        assert_eq!(roelcke_valid(&spec, &a, &bb, &z, &w), Ok(()));
        // z lies outside b(B), on one side of both points
        let zv = w.parts[1].map()[0];
        assert!(!w.parts[0].map().contains(&zv));
    }

    #[test]
    fn roelcke_free_join_in_graphs() {
        let spec = AgeSpec::catalog("graph").unwrap();
        let (a, bb, z) = (Structure::empty_graph(1), Structure::path_graph(3), Structure::complete_graph(2));
        let out = roelcke_witness(&spec, &a, &bb, &z, 5, &b()).unwrap();
        let w = out.witness.unwrap();
        assert_eq!(w.union.size(), 5);
        assert_eq!(w.union.tuple_count(), bb.tuple_count() + z.tuple_count());
    }
}
