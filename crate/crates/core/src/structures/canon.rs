//! Canonical labeling by individualization-refinement.
//!
//! Vertices carry an ordered partition (colors are dense ranks). Refinement
//! splits cells by the sorted multiset of colored tuple incidences until the
//! partition is equitable; the search then individualizes each vertex of the
//! first non-singleton cell in turn. Every leaf is a discrete partition, hence
//! a labeling, and the canonical code is the lexicographically least encoding
//! of the relabeled relations over all leaves. Automorphisms found by
//! comparing leaves prune sibling branches that lie in one orbit of the
//! pointwise stabilizer of the current prefix.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use super::Structure;
use crate::error::{Error, Result};

/// Opaque code of an isomorphism type within one signature.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        hex::decode(s)
            .map(CanonicalCode)
            .map_err(|e| Error::InvalidInput(format!("bad canonical code: {e}")))
    }

    /// Short digest for display: the first 16 hex digits of SHA-256.
    pub fn short_digest(&self) -> String {
        hex::encode(&Sha256::digest(&self.0)[..8])
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.to_hex())
    }
}

impl Serialize for CanonicalCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalCode::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Tuple incidences of one vertex: (relation, position, tuple index).
type Incidences = Vec<Vec<(u32, u32, usize)>>;

struct Engine<'a> {
    s: &'a Structure,
    incidences: Incidences,
    tuples: Vec<&'a [usize]>,
}

impl<'a> Engine<'a> {
    fn new(s: &'a Structure) -> Self {
        let mut incidences = vec![Vec::new(); s.size()];
        let mut tuples = Vec::new();
        for rel in 0..s.relation_count() {
            for t in s.tuples(rel) {
                let id = tuples.len();
                tuples.push(t.as_slice());
                for (pos, &v) in t.iter().enumerate() {
                    incidences[v].push((rel as u32, pos as u32, id));
                }
            }
        }
        Engine {
            s,
            incidences,
            tuples,
        }
    }

    fn cell_count(colors: &[u32]) -> usize {
        colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    /// Refine to an equitable ordered partition.
    fn refine(&self, colors: &mut [u32]) {
        let n = colors.len();
        let mut cells = Self::cell_count(colors);
        let mut scratch: Vec<Vec<u32>> = Vec::with_capacity(16);
        loop {
            if cells == n {
                return;
            }
            let mut sigs: Vec<Vec<u32>> = Vec::with_capacity(n);
            for v in 0..n {
                scratch.clear();
                for &(rel, pos, id) in &self.incidences[v] {
                    let mut inc = Vec::with_capacity(2 + self.tuples[id].len());
                    inc.push(rel);
                    inc.push(pos);
                    inc.extend(self.tuples[id].iter().map(|&u| colors[u]));
                    scratch.push(inc);
                }
                scratch.sort_unstable();
                let mut sig = vec![colors[v]];
                for inc in scratch.drain(..) {
                    sig.extend(inc);
                }
                sigs.push(sig);
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]));
            let mut rank = 0u32;
            for (i, &v) in order.iter().enumerate() {
                if i > 0 && sigs[v] != sigs[order[i - 1]] {
                    rank += 1;
                }
                colors[v] = rank;
            }
            let new_cells = rank as usize + 1;
            if new_cells == cells {
                return;
            }
            cells = new_cells;
        }
    }

    fn encode(&self, perm: &[usize]) -> Vec<u8> {
        let s = self.s;
        let mut out = Vec::with_capacity(2 + 4 * s.relation_count() + 2 * s.tuple_count() * 2);
        out.extend_from_slice(&(s.size() as u16).to_be_bytes());
        let mut mapped: Vec<Vec<usize>> = Vec::new();
        for rel in 0..s.relation_count() {
            mapped.clear();
            mapped.extend(
                s.tuples(rel)
                    .iter()
                    .map(|t| t.iter().map(|&v| perm[v]).collect::<Vec<_>>()),
            );
            mapped.sort_unstable();
            out.extend_from_slice(&(mapped.len() as u32).to_be_bytes());
            for t in &mapped {
                for &v in t {
                    out.extend_from_slice(&(v as u16).to_be_bytes());
                }
            }
        }
        out
    }
}

fn individualize(colors: &[u32], v: usize) -> Vec<u32> {
    let c = colors[v];
    colors
        .iter()
        .enumerate()
        .map(|(u, &cu)| if cu > c || (cu == c && u != v) { cu + 1 } else { cu })
        .collect()
}

fn target_cell(colors: &[u32]) -> Option<Vec<usize>> {
    let cells = Engine::cell_count(colors);
    let mut counts = vec![0usize; cells];
    for &c in colors {
        counts[c as usize] += 1;
    }
    let c = counts.iter().position(|&k| k >= 2)? as u32;
    Some((0..colors.len()).filter(|&v| colors[v] == c).collect())
}

/// `a^{-1} ∘ b` for two labelings giving the same relabeled structure.
fn automorphism_between(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; a.len()];
    for (v, &p) in a.iter().enumerate() {
        inv[p] = v;
    }
    b.iter().map(|&p| inv[p]).collect()
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

struct CanonSearch<'a> {
    engine: Engine<'a>,
    first: Option<(Vec<u8>, Vec<usize>)>,
    best: Option<(Vec<u8>, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
}

impl CanonSearch<'_> {
    fn record_auto(&mut self, g: Vec<usize>) {
        if g.iter().enumerate().any(|(i, &x)| i != x) && !self.autos.contains(&g) {
            self.autos.push(g);
        }
    }

    fn leaf(&mut self, colors: &[u32]) {
        let perm: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let code = self.engine.encode(&perm);
        match &self.first {
            None => self.first = Some((code.clone(), perm.clone())),
            Some((fc, fp)) if *fc == code => {
                let g = automorphism_between(fp, &perm);
                self.record_auto(g);
            }
            _ => {}
        }
        match &self.best {
            Some((bc, bp)) if *bc == code => {
                let g = automorphism_between(bp, &perm);
                self.record_auto(g);
            }
            Some((bc, _)) if *bc < code => {}
            _ => self.best = Some((code, perm)),
        }
    }

    fn same_orbit(&self, prefix: &[usize], v: usize, explored: &[usize]) -> bool {
        let n = self.engine.s.size();
        let mut parent: Vec<usize> = (0..n).collect();
        for g in &self.autos {
            if prefix.iter().all(|&p| g[p] == p) {
                for x in 0..n {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, g[x]));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&e| find(&mut parent, e) == rv)
    }

    fn dfs(&mut self, mut colors: Vec<u32>, prefix: &mut Vec<usize>) {
        self.engine.refine(&mut colors);
        let Some(cell) = target_cell(&colors) else {
            self.leaf(&colors);
            return;
        };
        let mut explored = Vec::new();
        for v in cell {
            if !explored.is_empty() && self.same_orbit(prefix, v, &explored) {
                continue;
            }
            explored.push(v);
            prefix.push(v);
            self.dfs(individualize(&colors, v), prefix);
            prefix.pop();
        }
    }
}

/// Canonical labeling: `perm[v]` is the canonical position of vertex `v`,
/// and `s.relabel(&perm)` has the returned code.
pub fn canonical_labeling(s: &Structure) -> (Vec<usize>, CanonicalCode) {
    let mut search = CanonSearch {
        engine: Engine::new(s),
        first: None,
        best: None,
        autos: Vec::new(),
    };
    search.dfs(vec![0; s.size()], &mut Vec::new());
    let (code, perm) = search.best.expect("search visits at least one leaf");
    (perm, CanonicalCode(code))
}

/// Canonical code of the isomorphism type of `s`.
pub fn canonical_form(s: &Structure) -> CanonicalCode {
    canonical_labeling(s).1
}

/// Every automorphism of `s`, sorted, found by an unpruned walk of the
/// refinement tree: each leaf whose encoding equals the first leaf's yields
/// exactly one automorphism.
pub(crate) fn all_automorphisms(s: &Structure, cap: usize) -> Result<Vec<Vec<usize>>> {
    struct Walk<'a> {
        engine: Engine<'a>,
        first: Option<(Vec<u8>, Vec<usize>)>,
        found: Vec<Vec<usize>>,
        leaves: usize,
        cap: usize,
    }
    impl Walk<'_> {
        fn dfs(&mut self, mut colors: Vec<u32>) -> Result<()> {
            self.engine.refine(&mut colors);
            let Some(cell) = target_cell(&colors) else {
                self.leaves += 1;
                if self.leaves > self.cap.saturating_mul(64).max(1 << 20) {
                    return Err(Error::ResourceLimit(
                        "automorphism search visited too many leaves".into(),
                    ));
                }
                let perm: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
                let code = self.engine.encode(&perm);
                match &self.first {
                    None => {
                        self.first = Some((code, perm.clone()));
                        self.found.push((0..perm.len()).collect());
                    }
                    Some((fc, fp)) if *fc == code => {
                        self.found.push(automorphism_between(fp, &perm));
                        if self.found.len() > self.cap {
                            return Err(Error::ResourceLimit(format!(
                                "automorphism group larger than the cap of {}",
                                self.cap
                            )));
                        }
                    }
                    _ => {}
                }
                return Ok(());
            };
            for v in cell {
                self.dfs(individualize(&colors, v))?;
            }
            Ok(())
        }
    }
    let mut walk = Walk {
        engine: Engine::new(s),
        first: None,
        found: Vec::new(),
        leaves: 0,
        cap,
    };
    walk.dfs(vec![0; s.size()])?;
    let mut found = walk.found;
    found.sort_unstable();
    found.dedup();
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{embeddings, Signature};

    /// Brute-force isomorphism oracle over all bijections.
    fn isomorphic(a: &Structure, b: &Structure) -> bool {
        a.size() == b.size() && !embeddings(a, b).unwrap().is_empty()
    }

    #[test]
    fn relabeled_cycle_has_same_code() {
        let c4 = Structure::cycle_graph(4);
        let other = c4.relabel(&[2, 0, 3, 1]);
        assert_ne!(c4, other);
        assert_eq!(canonical_form(&c4), canonical_form(&other));
    }

    #[test]
    fn path_and_triangle_differ() {
        assert_ne!(
            canonical_form(&Structure::path_graph(3)),
            canonical_form(&Structure::complete_graph(3))
        );
    }

    #[test]
    fn four_types_of_three_vertex_graphs() {
        let all: Vec<Structure> = (0..8u32)
            .map(|mask| {
                let pairs = [(0, 1), (0, 2), (1, 2)];
                let edges: Vec<_> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
                Structure::graph(3, &edges).unwrap()
            })
            .collect();
        let mut classes: Vec<Structure> = Vec::new();
        for g in &all {
            if !classes.iter().any(|c| isomorphic(c, g)) {
                classes.push(g.clone());
            }
        }
        assert_eq!(classes.len(), 4);
        let codes: std::collections::BTreeSet<_> = classes.iter().map(canonical_form).collect();
        assert_eq!(codes.len(), 4);
        for g in &all {
            for h in &all {
                assert_eq!(canonical_form(g) == canonical_form(h), isomorphic(g, h));
            }
        }
    }

    #[test]
    fn labeling_reproduces_code() {
        let s = Structure::new(
            Signature::from_pairs(&[("r", 2), ("p", 1)]).unwrap(),
            4,
            vec![vec![vec![0, 1], vec![1, 2], vec![3, 3]], vec![vec![2]]],
        )
        .unwrap();
        let (perm, code) = canonical_labeling(&s);
        let relabeled = s.relabel(&perm);
        assert_eq!(canonical_labeling(&relabeled).1, code);
        assert_eq!(Engine::new(&relabeled).encode(&(0..4).collect::<Vec<_>>()), code.0);
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(all_automorphisms(&Structure::cycle_graph(4), 1000).unwrap().len(), 8);
        assert_eq!(all_automorphisms(&Structure::chain(5), 1000).unwrap().len(), 1);
        assert_eq!(all_automorphisms(&Structure::pure_set(3), 1000).unwrap().len(), 6);
        assert_eq!(all_automorphisms(&Structure::cycle_graph(5), 1000).unwrap().len(), 10);
        assert!(all_automorphisms(&Structure::pure_set(6), 100).is_err());
    }

    #[test]
    fn hex_round_trip() {
        let code = canonical_form(&Structure::path_graph(4));
        assert_eq!(CanonicalCode::from_hex(&code.to_hex()).unwrap(), code);
        let json = serde_json::to_string(&code).unwrap();
        assert_eq!(serde_json::from_str::<CanonicalCode>(&json).unwrap(), code);
    }
}
