use std::collections::BTreeMap;

use rayon::prelude::*;

use super::AgeSpec;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::structures::{canonical_form, canonical_labeling, CanonicalCode, Structure};
use crate::unions::{free_items, Item};

/// One representative per isomorphism type of members of size `n`, each in
/// canonical labeling, ordered by canonical code.
pub fn enumerate_structures(spec: &AgeSpec, n: usize, budget: &Budget) -> Result<Vec<Structure>> {
    if n == 0 {
        return Err(Error::InvalidInput("enumeration size must be at least 1".into()));
    }
    let mut level = first_level(spec, budget)?;
    for size in 2..=n {
        level = next_level(spec, &level, size, budget)?;
    }
    Ok(level.into_values().collect())
}

/// Levels `1..=max_n`; `result[i]` holds the structures of size `i + 1`.
pub fn enumerate_up_to(spec: &AgeSpec, max_n: usize, budget: &Budget) -> Result<Vec<Vec<Structure>>> {
    let mut out = Vec::new();
    if max_n == 0 {
        return Ok(out);
    }
    let mut level = first_level(spec, budget)?;
    out.push(level.values().cloned().collect());
    for size in 2..=max_n {
        level = next_level(spec, &level, size, budget)?;
        out.push(level.values().cloned().collect());
    }
    Ok(out)
}

type Level = BTreeMap<CanonicalCode, Structure>;

fn first_level(spec: &AgeSpec, budget: &Budget) -> Result<Level> {
    let mut level = Level::new();
    let seed = Structure::from_parts_unchecked(
        spec.shared_signature(),
        1,
        vec![Vec::new(); spec.signature().len()],
    );
    extend(spec, &seed, 0, &mut level, budget)?;
    Ok(level)
}

fn next_level(spec: &AgeSpec, parents: &Level, size: usize, budget: &Budget) -> Result<Level> {
    let found: Vec<Result<Level>> = parents
        .par_iter()
        .map(|(_, parent)| {
            let grown = Structure::from_parts_unchecked(
                parent.shared_signature(),
                size,
                parent.relation_lists(),
            );
            let mut local = Level::new();
            extend_checked(spec, &grown, parent, &mut local, budget)?;
            Ok(local)
        })
        .collect();
    let mut level = Level::new();
    for part in found {
        for (code, s) in part? {
            level.entry(code).or_insert(s);
        }
    }
    Ok(level)
}

/// Tuples through the new vertex `last` (including loops), as items.
fn items_through(spec: &AgeSpec, size: usize, last: usize) -> Vec<Item> {
    let mut items = free_items(spec, size, &|t: &[usize]| !t.contains(&last));
    for (rel, sym) in spec.signature().symbols().iter().enumerate() {
        if sym.arity == 2 {
            let options = if spec.axioms()[rel].irreflexive {
                vec![0]
            } else {
                vec![0, 1]
            };
            items.push(Item {
                rel,
                tuple: vec![last, last],
                options,
            });
        }
    }
    items
}

fn extend(spec: &AgeSpec, base: &Structure, last: usize, level: &mut Level, budget: &Budget) -> Result<()> {
    for_each_completion(spec, base, last, budget, |s| {
        if spec.member_unchecked(&s) {
            let (perm, code) = canonical_labeling(&s);
            level.entry(code).or_insert_with(|| s.relabel(&perm));
        }
    })
}

fn extend_checked(
    spec: &AgeSpec,
    base: &Structure,
    parent: &Structure,
    level: &mut Level,
    budget: &Budget,
) -> Result<()> {
    let parent_code = canonical_form(parent);
    let last = base.size() - 1;
    for_each_completion(spec, base, last, budget, |s| {
        if !spec.member_unchecked(&s) {
            return;
        }
        let (perm, code) = canonical_labeling(&s);
        if level.contains_key(&code) {
            return;
        }
        let w = perm.iter().position(|&p| p == last).expect("permutation");
        let rest: Vec<usize> = (0..s.size()).filter(|&v| v != w).collect();
        if w == last || canonical_form(&s.restrict(&rest)) == parent_code {
            level.insert(code, s.relabel(&perm));
        }
    })
}

fn for_each_completion(
    spec: &AgeSpec,
    base: &Structure,
    last: usize,
    budget: &Budget,
    mut visit: impl FnMut(Structure),
) -> Result<()> {
    let items = items_through(spec, base.size(), last);
    let total = items
        .iter()
        .try_fold(1u128, |acc, it| acc.checked_mul(it.options.len() as u128))
        .unwrap_or(u128::MAX);
    budget.check_candidates("one-vertex extensions", total)?;
    if total == 0 {
        return Ok(());
    }
    let mut digits = vec![0usize; items.len()];
    loop {
        budget.charge(1)?;
        let mut relations = base.relation_lists();
        for (item, &d) in items.iter().zip(&digits) {
            let mask = item.options[d];
            if mask & 1 != 0 {
                relations[item.rel].push(item.tuple.clone());
            }
            if mask & 2 != 0 {
                relations[item.rel].push(vec![item.tuple[1], item.tuple[0]]);
            }
        }
        visit(Structure::from_parts_unchecked(
            base.shared_signature(),
            base.size(),
            relations,
        ));
        let mut i = digits.len();
        loop {
            if i == 0 {
                return Ok(());
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Signature;
    use crate::ages::Axioms;

    fn counts(name: &str, max: usize) -> Vec<usize> {
        let spec = AgeSpec::catalog(name).unwrap();
        enumerate_up_to(&spec, max, &Budget::default())
            .unwrap()
            .iter()
            .map(Vec::len)
            .collect()
    }

    #[test]
    fn known_counts() {
        assert_eq!(counts("graph", 5), vec![1, 2, 4, 11, 34]);
        assert_eq!(counts("linear_order", 5), vec![1, 1, 1, 1, 1]);
        assert_eq!(counts("set", 4), vec![1, 1, 1, 1]);
        assert_eq!(counts("graph_kfree:3", 4), vec![1, 2, 3, 7]);
        assert_eq!(counts("tournament", 5), vec![1, 1, 2, 4, 12]);
        assert_eq!(counts("digraph", 4), vec![1, 3, 16, 218]);
    }

    #[test]
    fn loops_and_unary_symbols() {
        // one unary and one unrestricted binary symbol: 2 * 2 = 4 one-point types
        let sig = Signature::from_pairs(&[("p", 1), ("r", 2)]).unwrap();
        let spec = AgeSpec::new(sig, vec![Axioms::default(); 2], vec![], None).unwrap();
        assert_eq!(enumerate_structures(&spec, 1, &Budget::default()).unwrap().len(), 4);
    }

    #[test]
    fn outputs_are_canonical_and_sorted() {
        let spec = AgeSpec::catalog("graph").unwrap();
        let level = enumerate_structures(&spec, 4, &Budget::default()).unwrap();
        let codes: Vec<_> = level.iter().map(canonical_form).collect();
        let mut sorted = codes.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(codes, sorted);
        for s in &level {
            let (perm, _) = canonical_labeling(s);
            assert_eq!(&s.relabel(&perm), s);
        }
    }

    #[test]
    fn candidate_cap_is_a_resource_limit() {
        let spec = AgeSpec::catalog("digraph").unwrap();
        let budget = Budget::default().with_max_candidates(10);
        let err = enumerate_structures(&spec, 3, &budget).unwrap_err();
        assert!(err.is_resource_limit());
    }
}
