//! Automorphism groups, orbits on embeddings and invariant partitions.

use serde::{Deserialize, Serialize};

use crate::ages::AgeSpec;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::structures::{all_automorphisms, embeddings, is_embedding, Embedding, Structure};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismSet {
    pub host: Structure,
    /// Sorted; the identity comes first.
    pub elements: Vec<Vec<usize>>,
}

impl AutomorphismSet {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Identity, closure under composition and inverses, and that every
    /// element is an automorphism.
    pub fn is_group(&self) -> bool {
        let n = self.host.size();
        let set: std::collections::HashSet<&Vec<usize>> = self.elements.iter().collect();
        let identity: Vec<usize> = (0..n).collect();
        if !set.contains(&identity) {
            return false;
        }
        for g in &self.elements {
            if !is_embedding(g, &self.host, &self.host) {
                return false;
            }
            let mut inv = vec![0; n];
            for (v, &gv) in g.iter().enumerate() {
                inv[gv] = v;
            }
            if !set.contains(&inv) {
                return false;
            }
            for h in &self.elements {
                let gh: Vec<usize> = h.iter().map(|&v| g[v]).collect();
                if !set.contains(&gh) {
                    return false;
                }
            }
        }
        true
    }
}

pub fn automorphisms(s: &Structure, budget: &Budget) -> Result<AutomorphismSet> {
    Ok(AutomorphismSet {
        host: s.clone(),
        elements: all_automorphisms(s, budget.max_group_order)?,
    })
}

/// A partition of `base` (some `Binom(host, A)`) into blocks of indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantPartition {
    pub base: Vec<Embedding>,
    /// Each block sorted; blocks ordered by least element.
    pub blocks: Vec<Vec<usize>>,
}

impl InvariantPartition {
    fn from_labels(base: Vec<Embedding>, labels: &[usize]) -> Self {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot: Vec<Option<usize>> = vec![None; labels.len()];
        for (i, &l) in labels.iter().enumerate() {
            let b = *slot[l].get_or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
        }
        InvariantPartition { base, blocks }
    }

    /// Block index of every base element.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.base.len()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                out[i] = b;
            }
        }
        out
    }

    pub fn is_partition(&self) -> bool {
        let labels = self.labels();
        labels.iter().all(|&l| l != usize::MAX)
            && self.blocks.iter().map(Vec::len).sum::<usize>() == self.base.len()
            && self.blocks.iter().all(|b| !b.is_empty())
    }

    /// Every group element maps every block onto itself.
    pub fn is_invariant(&self, group: &[Vec<usize>]) -> bool {
        let labels = self.labels();
        group.iter().all(|g| {
            self.base.iter().enumerate().all(|(i, e)| {
                let moved = Embedding(e.map().iter().map(|&v| g[v]).collect());
                match self.base.binary_search(&moved) {
                    Ok(j) => labels[j] == labels[i],
                    Err(_) => false,
                }
            })
        })
    }

    /// Is every block of `self` inside a block of `other`?
    pub fn refines(&self, other: &InvariantPartition) -> bool {
        let theirs = other.labels();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| theirs[i] == theirs[b[0]]))
    }

    pub fn is_single_block(&self) -> bool {
        self.blocks.len() <= 1
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// The Aut(S)-orbits on `embeddings(A, S)`.
pub fn orbits_on_embeddings(s: &Structure, a: &Structure, budget: &Budget) -> Result<InvariantPartition> {
    let group = automorphisms(s, budget)?;
    let base = embeddings(a, s)?;
    orbits_with(&group.elements, base)
}

fn orbits_with(group: &[Vec<usize>], base: Vec<Embedding>) -> Result<InvariantPartition> {
    let mut uf = UnionFind((0..base.len()).collect());
    for g in group {
        for (i, e) in base.iter().enumerate() {
            let moved = Embedding(e.map().iter().map(|&v| g[v]).collect());
            let j = base
                .binary_search(&moved)
                .map_err(|_| Error::Internal("automorphism image is not an embedding".into()))?;
            uf.union(i, j);
        }
    }
    let labels: Vec<usize> = (0..base.len()).map(|i| uf.find(i)).collect();
    Ok(InvariantPartition::from_labels(base, &labels))
}

/// Number of partitions of `n` items into at most `k` blocks.
fn partitions_at_most(n: usize, k: usize) -> u128 {
    // Stirling numbers of the second kind, row by row.
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; k + 1];
        for j in 1..=k {
            next[j] = row[j]
                .saturating_mul(j as u128)
                .saturating_add(row[j - 1]);
        }
        row = next;
    }
    row.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// All partitions of `embeddings(A, S)` into at most `max_blocks` blocks
/// that are unions of Aut(S)-orbits, in restricted-growth order over the
/// orbits.
pub fn invariant_partitions(
    s: &Structure,
    a: &Structure,
    max_blocks: usize,
    budget: &Budget,
) -> Result<Vec<InvariantPartition>> {
    if max_blocks == 0 {
        return Err(Error::InvalidInput("max_blocks must be at least 1".into()));
    }
    let orbits = orbits_on_embeddings(s, a, budget)?;
    coarsenings(&orbits, max_blocks, budget)
}

fn coarsenings(orbits: &InvariantPartition, max_blocks: usize, budget: &Budget) -> Result<Vec<InvariantPartition>> {
    let r = orbits.blocks.len();
    if r == 0 {
        return Ok(vec![orbits.clone()]);
    }
    budget.check_candidates("invariant partitions", partitions_at_most(r, max_blocks))?;
    let orbit_of = orbits.labels();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; r];
    loop {
        budget.charge(1)?;
        let labels: Vec<usize> = orbit_of.iter().map(|&o| rgs[o]).collect();
        out.push(InvariantPartition::from_labels(orbits.base.clone(), &labels));
        // next restricted growth string with at most max_blocks values
        let mut i = r;
        loop {
            if i <= 1 {
                return Ok(out);
            }
            i -= 1;
            let ceiling = rgs[..i].iter().max().copied().unwrap_or(0) + 1;
            if rgs[i] < ceiling && rgs[i] + 1 < max_blocks {
                rgs[i] += 1;
                for x in &mut rgs[i + 1..] {
                    *x = 0;
                }
                break;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainEvidence {
    /// Only the one-block family is coherent along the chain.
    OnlyTrivial,
    /// Some non-trivial coherent family exists up to the last level.
    Inconclusive,
    EmptyChain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherenceReport {
    /// Short description of the finite-level notion used.
    pub notion: String,
    /// `inclusions[i]` embeds chain member `i` into member `i + 1`.
    pub inclusions: Vec<Embedding>,
    pub families: Vec<Vec<InvariantPartition>>,
    pub evidence: ChainEvidence,
}

/// Families `(P_1, …, P_m)` of invariant partitions along the chain whose
/// restriction along each inclusion reproduces the previous level.
pub fn coherent_partitions(
    spec: &AgeSpec,
    chain: &[Structure],
    a: &Structure,
    max_blocks: usize,
    budget: &Budget,
) -> Result<CoherenceReport> {
    let notion = "blocks are unions of Aut(F_i)-orbits on Binom(F_i, A); \
                  P_{i+1} restricted along F_i -> F_{i+1} equals P_i"
        .to_string();
    if chain.is_empty() {
        return Ok(CoherenceReport {
            notion,
            inclusions: vec![],
            families: vec![],
            evidence: ChainEvidence::EmptyChain,
        });
    }
    let labeled: Vec<(String, &Structure)> = chain
        .iter()
        .enumerate()
        .map(|(i, f)| (format!("F{}", i + 1), f))
        .collect();
    for (label, f) in &labeled {
        spec.check_signature(f)?;
        spec.require_members(&[(label.as_str(), f)])?;
    }
    spec.check_signature(a)?;
    let mut inclusions = Vec::new();
    for w in chain.windows(2) {
        let identity: Vec<usize> = (0..w[0].size()).collect();
        if is_embedding(&identity, &w[0], &w[1]) {
            inclusions.push(Embedding(identity));
        } else {
            let first = embeddings(&w[0], &w[1])?.into_iter().next().ok_or_else(|| {
                Error::InvalidInput("a chain member does not embed in its successor".into())
            })?;
            inclusions.push(first);
        }
    }
    let levels: Vec<Vec<InvariantPartition>> = chain
        .iter()
        .map(|f| invariant_partitions(f, a, max_blocks, budget))
        .collect::<Result<_>>()?;
    // index of each embedding of level i inside level i + 1
    let mut lifts = Vec::new();
    for (i, inc) in inclusions.iter().enumerate() {
        let (lower, upper) = (&levels[i][0].base, &levels[i + 1][0].base);
        let lift: Vec<usize> = lower
            .iter()
            .map(|e| {
                upper
                    .binary_search(&inc.compose(e))
                    .map_err(|_| Error::Internal("composed embedding missing".into()))
            })
            .collect::<Result<_>>()?;
        lifts.push(lift);
    }
    let mut families = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    extend_family(&levels, &lifts, &mut current, &mut families, budget)?;
    let only_trivial = families
        .iter()
        .all(|f: &Vec<InvariantPartition>| f.iter().all(InvariantPartition::is_single_block));
    Ok(CoherenceReport {
        notion,
        inclusions,
        families,
        evidence: if only_trivial {
            ChainEvidence::OnlyTrivial
        } else {
            ChainEvidence::Inconclusive
        },
    })
}

fn restriction_matches(lower: &InvariantPartition, upper: &InvariantPartition, lift: &[usize]) -> bool {
    let lo = lower.labels();
    let up = upper.labels();
    for i in 0..lo.len() {
        for j in i + 1..lo.len() {
            if (lo[i] == lo[j]) != (up[lift[i]] == up[lift[j]]) {
                return false;
            }
        }
    }
    true
}

fn extend_family(
    levels: &[Vec<InvariantPartition>],
    lifts: &[Vec<usize>],
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<InvariantPartition>>,
    budget: &Budget,
) -> Result<()> {
    let depth = current.len();
    if depth == levels.len() {
        budget.check_candidates("coherent families", out.len() as u128 + 1)?;
        out.push(
            current
                .iter()
                .enumerate()
                .map(|(i, &p)| levels[i][p].clone())
                .collect(),
        );
        return Ok(());
    }
    for (p, part) in levels[depth].iter().enumerate() {
        budget.charge(1)?;
        if depth > 0 {
            let prev = &levels[depth - 1][current[depth - 1]];
            if !restriction_matches(prev, part, &lifts[depth - 1]) {
                continue;
            }
        }
        current.push(p);
        extend_family(levels, lifts, current, out, budget)?;
        current.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn group_orders() {
        assert_eq!(automorphisms(&Structure::chain(5), &b()).unwrap().order(), 1);
        let c4 = automorphisms(&Structure::cycle_graph(4), &b()).unwrap();
        assert_eq!(c4.order(), 8);
        assert!(c4.is_group());
        assert_eq!(automorphisms(&Structure::pure_set(3), &b()).unwrap().order(), 6);
    }

    #[test]
    fn orbit_examples() {
        let k1 = Structure::empty_graph(1);
        let p3 = orbits_on_embeddings(&Structure::path_graph(3), &k1, &b()).unwrap();
        assert_eq!(p3.blocks, vec![vec![0, 2], vec![1]]);
        let c4 = orbits_on_embeddings(&Structure::cycle_graph(4), &k1, &b()).unwrap();
        assert_eq!(c4.blocks.len(), 1);
        let pt = Structure::chain(1);
        let ch = orbits_on_embeddings(&Structure::chain(5), &pt, &b()).unwrap();
        assert_eq!(ch.blocks.len(), 5);
    }

    #[test]
    fn partition_examples() {
        let k1 = Structure::empty_graph(1);
        assert_eq!(invariant_partitions(&Structure::cycle_graph(4), &k1, 4, &b()).unwrap().len(), 1);
        let p3 = invariant_partitions(&Structure::path_graph(3), &k1, 3, &b()).unwrap();
        assert_eq!(p3.len(), 2);
        for p in &p3 {
            assert!(p.is_invariant(&automorphisms(&Structure::path_graph(3), &b()).unwrap().elements));
        }
        // rigid host: all partitions of 4 items into at most 2 blocks = 1 + 7
        let pt = Structure::chain(1);
        assert_eq!(invariant_partitions(&Structure::chain(4), &pt, 2, &b()).unwrap().len(), 8);
        assert_eq!(invariant_partitions(&Structure::chain(4), &pt, 4, &b()).unwrap().len(), 15);
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions_at_most(4, 4), 15);
        assert_eq!(partitions_at_most(5, 2), 16);
        assert_eq!(partitions_at_most(3, 1), 1);
    }

    #[test]
    fn complete_graph_chain_is_trivial() {
        let spec = AgeSpec::catalog("graph").unwrap();
        let chain: Vec<_> = (2..=4).map(Structure::complete_graph).collect();
        let r = coherent_partitions(&spec, &chain, &Structure::empty_graph(1), 3, &b()).unwrap();
        assert_eq!(r.families.len(), 1);
        assert_eq!(r.evidence, ChainEvidence::OnlyTrivial);
    }

    #[test]
    fn rigid_chain_is_inconclusive() {
        let spec = AgeSpec::catalog("linear_order").unwrap();
        let chain: Vec<_> = (2..=4).map(Structure::chain).collect();
        let r = coherent_partitions(&spec, &chain, &Structure::chain(1), 2, &b()).unwrap();
        assert!(r.families.len() > 1);
        assert_eq!(r.evidence, ChainEvidence::Inconclusive);
        let empty = coherent_partitions(&spec, &[], &Structure::chain(1), 2, &b()).unwrap();
        assert!(empty.families.is_empty());
    }
}
