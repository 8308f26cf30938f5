//! Enumeration of union structures carrying several embedded parts.
//!
//! Every union is built in two stages: first an identification pattern
//! (which vertices of different parts coincide), then a completion of the
//! relation tuples that no single part image covers. Each identification
//! pattern is produced once, with fresh vertices numbered in order of first
//! appearance.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::ages::{AgeSpec, Axioms};
use crate::budget::Budget;
use crate::error::Result;
use crate::structures::{Signature, Structure};

pub(crate) struct Unions<'a> {
    pub spec: &'a AgeSpec,
    pub parts: Vec<&'a Structure>,
    /// `forced[p][v] = Some((q, w))` glues vertex `v` of part `p` to vertex
    /// `w` of the earlier part `q`.
    pub forced: Vec<Vec<Option<(usize, usize)>>>,
    /// Allow identifications beyond the forced ones.
    pub identify: bool,
    /// Allow tuples outside every part image.
    pub cross_tuples: bool,
    pub max_size: usize,
    pub budget: &'a Budget,
}

/// One free item: an unordered pair for a binary symbol, a single tuple
/// otherwise.
pub(crate) struct Item {
    pub rel: usize,
    pub tuple: Vec<usize>,
    /// Option bit masks: bit 0 = tuple (or forward arc), bit 1 = backward arc.
    pub options: Vec<u8>,
}

impl<'a> Unions<'a> {
    pub fn new(spec: &'a AgeSpec, parts: Vec<&'a Structure>, budget: &'a Budget) -> Self {
        let forced = parts.iter().map(|p| vec![None; p.size()]).collect();
        let max_size = parts.iter().map(|p| p.size()).sum();
        Unions {
            spec,
            parts,
            forced,
            identify: true,
            cross_tuples: true,
            max_size,
            budget,
        }
    }

    /// Visit every union in a deterministic order: the free join (all
    /// vertices distinct, no extra tuples) comes first. `visit` receives the
    /// union and one vertex map per part.
    pub fn for_each<B>(
        &self,
        mut visit: impl FnMut(&Structure, &[Vec<usize>]) -> ControlFlow<B>,
    ) -> Result<Option<B>> {
        let mut maps: Vec<Vec<usize>> = self.parts.iter().map(|p| vec![0; p.size()]).collect();
        let mut state = Dfs {
            used: Vec::new(),
            count: 0,
        };
        match self.identify_dfs(0, 0, &mut maps, &mut state, &mut visit)? {
            ControlFlow::Break(b) => Ok(Some(b)),
            ControlFlow::Continue(()) => Ok(None),
        }
    }

    fn identify_dfs<B>(
        &self,
        part: usize,
        vertex: usize,
        maps: &mut Vec<Vec<usize>>,
        state: &mut Dfs,
        visit: &mut impl FnMut(&Structure, &[Vec<usize>]) -> ControlFlow<B>,
    ) -> Result<ControlFlow<B>> {
        if part == self.parts.len() {
            return self.complete(maps, state.count, visit);
        }
        if vertex == self.parts[part].size() {
            return self.identify_dfs(part + 1, 0, maps, state, visit);
        }
        if vertex == 0 {
            state.used.push(vec![false; self.max_size]);
        }
        let result = (|| {
            let mut choices = Vec::new();
            if let Some((q, w)) = self.forced[part][vertex] {
                choices.push(maps[q][w]);
            } else {
                if state.count < self.max_size {
                    choices.push(state.count);
                }
                if self.identify {
                    choices.extend((0..state.count).filter(|&id| !state.used[part][id]));
                }
            }
            for id in choices {
                if id < state.count && state.used[part][id] {
                    continue;
                }
                let fresh = id == state.count;
                if fresh {
                    state.count += 1;
                }
                state.used[part][id] = true;
                maps[part][vertex] = id;
                let flow = self.identify_dfs(part, vertex + 1, maps, state, visit);
                state.used[part][id] = false;
                if fresh {
                    state.count -= 1;
                }
                if let ControlFlow::Break(b) = flow? {
                    return Ok(ControlFlow::Break(b));
                }
            }
            Ok(ControlFlow::Continue(()))
        })();
        if vertex == 0 {
            state.used.pop();
        }
        result
    }

    fn complete<B>(
        &self,
        maps: &[Vec<usize>],
        size: usize,
        visit: &mut impl FnMut(&Structure, &[Vec<usize>]) -> ControlFlow<B>,
    ) -> Result<ControlFlow<B>> {
        self.budget.charge(1)?;
        let signature: Arc<Signature> = self.spec.shared_signature();
        let mut base: Vec<Vec<Vec<usize>>> = vec![Vec::new(); signature.len()];
        for (part, map) in self.parts.iter().zip(maps) {
            for (rel, tuples) in base.iter_mut().enumerate() {
                tuples.extend(
                    part.tuples(rel)
                        .iter()
                        .map(|t| t.iter().map(|&v| map[v]).collect::<Vec<_>>()),
                );
            }
        }
        // Inverse maps: id -> vertex of each part.
        let inverses: Vec<Vec<Option<usize>>> = maps
            .iter()
            .map(|map| {
                let mut inv = vec![None; size];
                for (v, &id) in map.iter().enumerate() {
                    inv[id] = Some(v);
                }
                inv
            })
            .collect();
        for (rel, tuples) in base.iter().enumerate() {
            for t in tuples {
                for (part, inv) in self.parts.iter().zip(&inverses) {
                    let pre: Option<Vec<usize>> = t.iter().map(|&id| inv[id]).collect();
                    if let Some(pre) = pre {
                        if !part.holds(rel, &pre) {
                            return Ok(ControlFlow::Continue(()));
                        }
                    }
                }
            }
        }
        let covered = |tuple: &[usize]| {
            inverses
                .iter()
                .any(|inv| tuple.iter().all(|&id| inv[id].is_some()))
        };
        let items = free_items(self.spec, size, &covered);
        if !self.cross_tuples {
            // Only the empty completion is allowed.
            if items.iter().any(|it| !it.options.contains(&0)) {
                return Ok(ControlFlow::Continue(()));
            }
            let union = Structure::from_parts_unchecked(signature, size, base);
            if self.spec.member_unchecked(&union) {
                return Ok(visit(&union, maps));
            }
            return Ok(ControlFlow::Continue(()));
        }
        let total: u128 = items
            .iter()
            .map(|it| it.options.len() as u128)
            .try_fold(1u128, |acc, r| acc.checked_mul(r))
            .unwrap_or(u128::MAX);
        if total == 0 {
            return Ok(ControlFlow::Continue(()));
        }
        self.budget.check_candidates("relation completions", total)?;
        let mut digits = vec![0usize; items.len()];
        loop {
            self.budget.charge(1)?;
            let mut relations = base.clone();
            for (item, &d) in items.iter().zip(&digits) {
                let mask = item.options[d];
                if mask & 1 != 0 {
                    relations[item.rel].push(item.tuple.clone());
                }
                if mask & 2 != 0 {
                    relations[item.rel].push(vec![item.tuple[1], item.tuple[0]]);
                }
            }
            let union = Structure::from_parts_unchecked(Arc::clone(&signature), size, relations);
            if self.spec.member_unchecked(&union) {
                if let ControlFlow::Break(b) = visit(&union, maps) {
                    return Ok(ControlFlow::Break(b));
                }
            }
            // Mixed-radix increment, last item fastest.
            let mut i = digits.len();
            loop {
                if i == 0 {
                    return Ok(ControlFlow::Continue(()));
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < items[i].options.len() {
                    break;
                }
                digits[i] = 0;
            }
        }
    }
}

struct Dfs {
    used: Vec<Vec<bool>>,
    count: usize,
}

pub(crate) fn binary_options(ax: &Axioms) -> Vec<u8> {
    [0u8, 1, 2, 3]
        .into_iter()
        .filter(|&m| {
            let (fwd, bwd) = (m & 1 != 0, m & 2 != 0);
            !(ax.symmetric && fwd != bwd
                || ax.antisymmetric && fwd && bwd
                || ax.total && !fwd && !bwd)
        })
        .collect()
}

/// Tuples over `0..size` not covered by any part image, grouped into items.
pub(crate) fn free_items(spec: &AgeSpec, size: usize, covered: &dyn Fn(&[usize]) -> bool) -> Vec<Item> {
    let mut items = Vec::new();
    for (rel, sym) in spec.signature().symbols().iter().enumerate() {
        if sym.arity == 2 {
            let options = binary_options(&spec.axioms()[rel]);
            for u in 0..size {
                for v in u + 1..size {
                    if !covered(&[u, v]) {
                        items.push(Item {
                            rel,
                            tuple: vec![u, v],
                            options: options.clone(),
                        });
                    }
                }
            }
            continue;
        }
        let mut tuple = vec![0; sym.arity];
        loop {
            if !covered(&tuple) {
                items.push(Item {
                    rel,
                    tuple: tuple.clone(),
                    options: vec![0, 1],
                });
            }
            let mut i = sym.arity;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                tuple[i] += 1;
                if tuple[i] < size {
                    break;
                }
                tuple[i] = 0;
            }
            if tuple.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    items
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(u: &Unions) -> usize {
        let mut n = 0;
        u.for_each::<()>(|_, _| {
            n += 1;
            ControlFlow::Continue(())
        })
        .unwrap();
        n
    }

    #[test]
    fn two_points_in_graphs() {
        let spec = AgeSpec::catalog("graph").unwrap();
        let k1 = Structure::empty_graph(1);
        let budget = Budget::default();
        // equal, distinct non-adjacent, distinct adjacent
        assert_eq!(count(&Unions::new(&spec, vec![&k1, &k1], &budget)), 3);
    }

    #[test]
    fn free_join_comes_first() {
        let spec = AgeSpec::catalog("graph").unwrap();
        let k2 = Structure::complete_graph(2);
        let budget = Budget::default();
        let first = Unions::new(&spec, vec![&k2, &k2], &budget)
            .for_each(|u, maps| ControlFlow::Break((u.clone(), maps.to_vec())))
            .unwrap()
            .unwrap();
        assert_eq!(first.0.size(), 4);
        assert_eq!(first.0.tuple_count(), 4);
        assert_eq!(first.1, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn inconsistent_overlaps_are_rejected() {
        let spec = AgeSpec::catalog("graph").unwrap();
        let k2 = Structure::complete_graph(2);
        let e2 = Structure::empty_graph(2);
        let budget = Budget::default();
        let mut seen = 0;
        Unions::new(&spec, vec![&k2, &e2], &budget)
            .for_each::<()>(|u, maps| {
                seen += 1;
                // the two images never share both vertices
                let shared = maps[1].iter().filter(|&&x| maps[0].contains(&x)).count();
                assert!(shared < 2);
                assert!(u.size() >= 3);
                ControlFlow::Continue(())
            })
            .unwrap();
        assert!(seen > 0);
    }

    #[test]
    fn total_axiom_blocks_free_completion() {
        let spec = AgeSpec::catalog("linear_order").unwrap();
        let pt = Structure::chain(1);
        let budget = Budget::default();
        let mut u = Unions::new(&spec, vec![&pt, &pt], &budget);
        u.identify = false;
        u.cross_tuples = false;
        assert_eq!(count(&u), 0);
        u.cross_tuples = true;
        assert_eq!(count(&u), 2);
    }

    #[test]
    fn ternary_items_cover_all_tuples() {
        let sig = Signature::from_pairs(&[("r", 3)]).unwrap();
        let spec = AgeSpec::new(sig.clone(), vec![Axioms::default()], vec![], None).unwrap();
        let pt = Structure::new(sig, 1, vec![vec![]]).unwrap();
        let budget = Budget::default();
        let mut u = Unions::new(&spec, vec![&pt, &pt], &budget);
        u.identify = false;
        // 2^3 - 2 tuples over two vertices are free (the constant ones are covered)
        assert_eq!(count(&u), 1 << 6);
    }
}
