use serde::{Deserialize, Serialize};

use super::coloring::CopySystem;
use super::Verdict;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::structures::{all_automorphisms, Embedding, Structure};

/// Largest automorphism group used for symmetry breaking; beyond it the
/// search runs without symmetry.
const SYMMETRY_CAP: usize = 5040;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalOutcome {
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub colors: usize,
    pub domain_size: usize,
    pub copy_count: usize,
    /// For `fails`: a coloring of `embeddings(A, C)` with no monochromatic
    /// copy of `B`, lexicographically least up to symmetry.
    pub coloring: Option<Vec<usize>>,
    pub search_nodes: u64,
    pub symmetry_order: usize,
}

/// Decide `C → (B)^A_k` by backtracking over colorings of `embeddings(A, C)`.
pub fn classical_arrow(
    c: &Structure,
    a: &Structure,
    b: &Structure,
    k: usize,
    budget: &Budget,
) -> Result<ClassicalOutcome> {
    if k == 0 || k > 64 {
        return Err(Error::InvalidInput("the number of colors must be in 1..=64".into()));
    }
    let sys = CopySystem::new(a, b, c)?;
    let mut out = ClassicalOutcome {
        verdict: Verdict::Holds,
        reason: None,
        colors: k,
        domain_size: sys.domain.len(),
        copy_count: sys.copies.len(),
        coloring: None,
        search_nodes: 0,
        symmetry_order: 1,
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
    let group = match all_automorphisms(c, SYMMETRY_CAP) {
        Ok(g) => g,
        Err(_) => vec![(0..c.size()).collect()],
    };
    out.symmetry_order = group.len();
    let perms = domain_permutations(&sys.domain, &group)?;
    let mut search = Search::new(&sys, k, perms, budget);
    let found = search.run()?;
    out.search_nodes = search.nodes;
    if let Some(coloring) = found {
        out.verdict = Verdict::Fails;
        out.coloring = Some(coloring);
    }
    Ok(out)
}

/// Action of each non-identity automorphism on domain indices.
pub(crate) fn domain_permutations(domain: &[Embedding], group: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for g in group {
        if g.iter().enumerate().all(|(i, &x)| i == x) {
            continue;
        }
        let perm = domain
            .iter()
            .map(|e| {
                let moved = Embedding(e.map().iter().map(|&v| g[v]).collect());
                domain
                    .binary_search(&moved)
                    .map_err(|_| Error::Internal("automorphism moved an embedding out of the domain".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(perm);
    }
    Ok(out)
}

const UNSET: usize = usize::MAX;

struct Search<'a> {
    sets: &'a [Vec<usize>],
    sets_of: Vec<Vec<usize>>,
    k: usize,
    perms: Vec<Vec<usize>>,
    budget: &'a Budget,
    color: Vec<usize>,
    domains: Vec<u64>,
    trail: Vec<(usize, u64)>,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(sys: &'a CopySystem, k: usize, perms: Vec<Vec<usize>>, budget: &'a Budget) -> Self {
        let n = sys.domain.len();
        let mut sets_of = vec![Vec::new(); n];
        for (s, set) in sys.sets.iter().enumerate() {
            for &i in set {
                sets_of[i].push(s);
            }
        }
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        Search {
            sets: &sys.sets,
            sets_of,
            k,
            perms,
            budget,
            color: vec![UNSET; n],
            domains: vec![full; n],
            trail: Vec::new(),
            nodes: 0,
        }
    }

    fn run(&mut self) -> Result<Option<Vec<usize>>> {
        // A copy whose A-embeddings are a single point is monochromatic
        // under every coloring.
        if self.sets.iter().any(|s| s.len() <= 1) {
            return Ok(None);
        }
        if self.assign(0, 0)? {
            Ok(Some(self.color.clone()))
        } else {
            Ok(None)
        }
    }

    /// Try to complete the coloring from position `i`; `used` is the number
    /// of distinct colors among positions before `i`.
    fn assign(&mut self, i: usize, used: usize) -> Result<bool> {
        if i == self.color.len() {
            return Ok(true);
        }
        let limit = (used + 1).min(self.k);
        for v in 0..limit {
            if self.domains[i] >> v & 1 == 0 {
                continue;
            }
            self.nodes += 1;
            self.budget.charge(1)?;
            let mark = self.trail.len();
            self.color[i] = v;
            if self.propagate(i) && self.lex_leader(i) && self.assign(i + 1, used.max(v + 1))? {
                return Ok(true);
            }
            self.color[i] = UNSET;
            while self.trail.len() > mark {
                let (var, mask) = self.trail.pop().unwrap();
                self.domains[var] = mask;
            }
        }
        Ok(false)
    }

    /// Forward checking on the copies through `i`: a fully colored copy must
    /// see two colors, and a copy with one open position whose colored
    /// positions agree forbids that color there.
    fn propagate(&mut self, i: usize) -> bool {
        for si in 0..self.sets_of[i].len() {
            let s = self.sets_of[i][si];
            let mut open = None;
            let mut open_count = 0;
            let mut first = UNSET;
            let mut mono = true;
            for &x in &self.sets[s] {
                let c = self.color[x];
                if c == UNSET {
                    open = Some(x);
                    open_count += 1;
                } else if first == UNSET {
                    first = c;
                } else if c != first {
                    mono = false;
                }
            }
            if !mono {
                continue;
            }
            match open_count {
                0 => return false,
                1 => {
                    let x = open.unwrap();
                    let old = self.domains[x];
                    let new = old & !(1u64 << first);
                    if new != old {
                        self.trail.push((x, old));
                        self.domains[x] = new;
                        if new == 0 {
                            return false;
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }

    /// Reject prefixes that some automorphism, followed by renaming colors in
    /// order of first occurrence, maps to a lexicographically smaller prefix.
    fn lex_leader(&self, t: usize) -> bool {
        let mut rename = vec![UNSET; self.k];
        for perm in &self.perms {
            rename.iter_mut().for_each(|r| *r = UNSET);
            let mut next = 0;
            for i in 0..=t {
                let j = perm[i];
                if j > t {
                    break;
                }
                let raw = self.color[j];
                if rename[raw] == UNSET {
                    rename[raw] = next;
                    next += 1;
                }
                let psi = rename[raw];
                if psi < self.color[i] {
                    return false;
                }
                if psi > self.color[i] {
                    break;
                }
            }
        }
        true
    }
}

/// Independent check of a claimed bad coloring: every copy of `B` sees at
/// least two colors. Returns a description of the first problem.
pub fn check_bad_coloring(
    c: &Structure,
    a: &Structure,
    b: &Structure,
    k: usize,
    coloring: &[usize],
) -> Result<(), String> {
    let sys = CopySystem::new(a, b, c).map_err(|e| e.to_string())?;
    if coloring.len() != sys.domain.len() {
        return Err(format!(
            "coloring has {} values, the domain has {}",
            coloring.len(),
            sys.domain.len()
        ));
    }
    if let Some(v) = coloring.iter().find(|&&v| v >= k) {
        return Err(format!("color {v} is not below {k}"));
    }
    if sys.copies.is_empty() {
        return Err("there is no copy of B to color".into());
    }
    for (copy, set) in sys.copies.iter().zip(&sys.sets) {
        if set.iter().all(|&i| coloring[i] == coloring[set[0]]) {
            return Err(format!("copy {copy} is monochromatic"));
        }
    }
    Ok(())
}

/// Plain backtracking without symmetry breaking or propagation: some
/// coloring with no monochromatic copy, if one exists.
pub fn find_bad_coloring_plain(
    c: &Structure,
    a: &Structure,
    b: &Structure,
    k: usize,
    budget: &Budget,
) -> Result<Option<Vec<usize>>> {
    let sys = CopySystem::new(a, b, c)?;
    let n = sys.domain.len();
    // copies that become fully colored at each position
    let mut closing = vec![Vec::new(); n];
    for set in &sys.sets {
        if let Some(&last) = set.iter().max() {
            closing[last].push(set.clone());
        }
    }
    if sys.copies.is_empty() || sys.sets.iter().any(|s| s.is_empty()) {
        return Ok(None);
    }
    fn go(
        i: usize,
        k: usize,
        color: &mut Vec<usize>,
        closing: &[Vec<Vec<usize>>],
        budget: &Budget,
    ) -> Result<bool> {
        if i == color.len() {
            return Ok(true);
        }
        for v in 0..k {
            budget.charge(1)?;
            color[i] = v;
            let ok = closing[i]
                .iter()
                .all(|set| set.iter().any(|&x| color[x] != color[set[0]]));
            if ok && go(i + 1, k, color, closing, budget)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    let mut color = vec![0; n];
    Ok(if go(0, k, &mut color, &closing, budget)? {
        Some(color)
    } else {
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decide(c: &Structure, a: &Structure, b: &Structure, k: usize) -> ClassicalOutcome {
        classical_arrow(c, a, b, k, &Budget::default()).unwrap()
    }

    #[test]
    fn ramsey_three_three_in_orders() {
        let (a, b) = (Structure::chain(2), Structure::chain(3));
        assert_eq!(decide(&Structure::chain(6), &a, &b, 2).verdict, Verdict::Holds);
        let five = decide(&Structure::chain(5), &a, &b, 2);
        assert_eq!(five.verdict, Verdict::Fails);
        let coloring = five.coloring.unwrap();
        assert_eq!(check_bad_coloring(&Structure::chain(5), &a, &b, 2, &coloring), Ok(()));
    }

    #[test]
    fn one_color_always_holds() {
        let k3 = Structure::complete_graph(3);
        let out = decide(&Structure::complete_graph(4), &Structure::complete_graph(2), &k3, 1);
        assert_eq!(out.verdict, Verdict::Holds);
    }

    #[test]
    fn degenerate_cases() {
        let out = decide(&Structure::chain(2), &Structure::chain(1), &Structure::chain(3), 2);
        assert_eq!(out.verdict, Verdict::Fails);
        assert_eq!(out.reason.as_deref(), Some("no copy of B"));
        let out = decide(
            &Structure::complete_graph(3),
            &Structure::empty_graph(2),
            &Structure::complete_graph(2),
            2,
        );
        assert_eq!(out.verdict, Verdict::DegenerateHolds);
    }

    #[test]
    fn symmetric_hosts_use_their_group() {
        // pigeonhole: 5 points, 2 colors, a monochromatic triple exists
        let out = decide(&Structure::pure_set(5), &Structure::pure_set(1), &Structure::pure_set(3), 2);
        assert_eq!(out.verdict, Verdict::Holds);
        assert_eq!(out.symmetry_order, 120);
        let out = decide(&Structure::pure_set(4), &Structure::pure_set(1), &Structure::pure_set(3), 2);
        assert_eq!(out.verdict, Verdict::Fails);
        assert_eq!(out.coloring, Some(vec![0, 0, 1, 1]));
    }

    #[test]
    fn tampered_coloring_is_caught() {
        let (a, b, c) = (Structure::chain(2), Structure::chain(3), Structure::chain(5));
        let mut coloring = decide(&c, &a, &b, 2).coloring.unwrap();
        let bad = (0..coloring.len()).any(|i| {
            coloring[i] ^= 1;
            let r = check_bad_coloring(&c, &a, &b, 2, &coloring).is_err();
            coloring[i] ^= 1;
            r
        });
        assert!(bad);
    }
}
