use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::game::{solve_matrix_game, GAP_TOLERANCE};
use super::{domain_permutations, CopySystem, Verdict, TOLERANCE};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::structures::{all_automorphisms, is_embedding, Embedding, Structure};

/// Weights over copies of `B` in `C`; zero weights are dropped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexCombination {
    pub weights: Vec<f64>,
    pub copies: Vec<Embedding>,
}

impl ConvexCombination {
    pub fn validate(&self) -> Result<(), String> {
        if self.weights.len() != self.copies.len() {
            return Err("weights and copies differ in length".into());
        }
        if self.weights.iter().any(|&w| w < -TOLERANCE) {
            return Err("negative weight".into());
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > TOLERANCE {
            return Err(format!("weights sum to {sum}, not 1"));
        }
        Ok(())
    }
}

/// One adversary pure strategy: colour `color` on `embeddings(A, B)[high]`
/// against the same colour on `embeddings(A, B)[low]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryColumn {
    pub color: usize,
    pub high: usize,
    pub low: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub coloring: Vec<usize>,
    pub value: f64,
    pub combination: ConvexCombination,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexOutcome {
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub epsilon: f64,
    pub colors: usize,
    /// Largest game value over all colorings.
    pub value: f64,
    pub worst_coloring: Vec<usize>,
    /// Optimal combination against the worst coloring.
    pub strategy: Option<ConvexCombination>,
    /// For `fails`: the adversary's mixed strategy against every combination.
    pub adversary: Vec<AdversaryColumn>,
    /// For `holds`: one entry per coloring up to symmetry.
    pub table: Vec<StrategyEntry>,
    pub symmetry_order: usize,
}

/// Columns `(color, high, low)` with `high ≠ low`.
fn columns(k: usize, inner: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for j in 0..k {
        for p in 0..inner {
            for q in 0..inner {
                if p != q {
                    out.push((j, p, q));
                }
            }
        }
    }
    out
}

fn payoff(sys: &CopySystem, coloring: &[usize], cols: &[(usize, usize, usize)]) -> Vec<Vec<f64>> {
    sys.sets
        .iter()
        .map(|set| {
            cols.iter()
                .map(|&(j, p, q)| {
                    (coloring[set[p]] == j) as i32 as f64 - (coloring[set[q]] == j) as i32 as f64
                })
                .collect()
        })
        .collect()
}

/// Solve the game for one coloring; a monochromatic copy is used directly.
fn solve_one(
    sys: &CopySystem,
    coloring: &[usize],
    cols: &[(usize, usize, usize)],
) -> Result<(f64, ConvexCombination, Vec<f64>)> {
    if let Some(i) = sys
        .sets
        .iter()
        .position(|set| set.iter().all(|&x| coloring[x] == coloring[set[0]]))
    {
        return Ok((
            0.0,
            ConvexCombination {
                weights: vec![1.0],
                copies: vec![sys.copies[i].clone()],
            },
            vec![],
        ));
    }
    let m = payoff(sys, coloring, cols);
    let sol = solve_matrix_game(&m)?;
    // Prefer a single copy when it is already optimal.
    let pure = m
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
    let combination = if pure.1 <= sol.value + TOLERANCE {
        ConvexCombination {
            weights: vec![1.0],
            copies: vec![sys.copies[pure.0].clone()],
        }
    } else {
        let mut weights = Vec::new();
        let mut copies = Vec::new();
        for (i, &w) in sol.rows.iter().enumerate() {
            if w > TOLERANCE {
                weights.push(w);
                copies.push(sys.copies[i].clone());
            }
        }
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= s);
        ConvexCombination { weights, copies }
    };
    Ok((sol.value.max(0.0), combination, sol.columns))
}

/// Restricted-growth colorings with at most `k` colors that are least in
/// their orbit under the automorphisms of `C` (with colors renamed in order
/// of first occurrence).
fn representatives(n: usize, k: usize, perms: &[Vec<usize>], budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let total = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    budget.check_candidates("colorings", total)?;
    let mut out = Vec::new();
    let mut coloring = vec![0usize; n];
    loop {
        budget.charge(1)?;
        if perms.iter().all(|p| !renamed_smaller(&coloring, p, k)) {
            out.push(coloring.clone());
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return Ok(out);
            }
            i -= 1;
            let ceiling = coloring[..i].iter().max().map_or(0, |m| m + 1);
            if coloring[i] < ceiling && coloring[i] + 1 < k {
                coloring[i] += 1;
                coloring[i + 1..].iter_mut().for_each(|x| *x = 0);
                break;
            }
        }
    }
}

fn renamed(coloring: &[usize], perm: &[usize], k: usize) -> Vec<usize> {
    let mut rename = vec![usize::MAX; k];
    let mut next = 0;
    perm.iter()
        .map(|&j| {
            let raw = coloring[j];
            if rename[raw] == usize::MAX {
                rename[raw] = next;
                next += 1;
            }
            rename[raw]
        })
        .collect()
}

fn renamed_smaller(coloring: &[usize], perm: &[usize], k: usize) -> bool {
    renamed(coloring, perm, k) < coloring.to_vec()
}

/// Decide whether every `k`-coloring of `embeddings(A, C)` admits a convex
/// combination of copies of `B` whose averaged coloring oscillates by at most
/// `epsilon` on `embeddings(A, B)`.
pub fn convex_arrow(
    c: &Structure,
    a: &Structure,
    b: &Structure,
    epsilon: f64,
    k: usize,
    budget: &Budget,
) -> Result<ConvexOutcome> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    if k == 0 {
        return Err(Error::InvalidInput("the number of colors must be positive".into()));
    }
    let sys = CopySystem::new(a, b, c)?;
    if sys.copies.is_empty() {
        return Err(Error::InvalidInput("B does not embed in C".into()));
    }
    let mut out = ConvexOutcome {
        verdict: Verdict::Holds,
        reason: None,
        epsilon,
        colors: k,
        value: 0.0,
        worst_coloring: vec![0; sys.domain.len()],
        strategy: None,
        adversary: vec![],
        table: vec![],
        symmetry_order: 1,
    };
    if sys.inner.is_empty() {
        out.verdict = Verdict::DegenerateHolds;
        out.reason = Some("A does not embed in B".into());
        return Ok(out);
    }
    let group = all_automorphisms(c, budget.max_group_order)?;
    out.symmetry_order = group.len();
    let perms = domain_permutations(&sys.domain, &group)?;
    let reps = representatives(sys.domain.len(), k, &perms, budget)?;
    let cols = columns(k, sys.inner.len());
    let solved: Vec<Result<(f64, ConvexCombination, Vec<f64>)>> = reps
        .par_iter()
        .map(|rep| {
            budget.charge(1)?;
            solve_one(&sys, rep, &cols)
        })
        .collect();
    let mut worst: Option<(usize, f64, Vec<f64>)> = None;
    let mut table = Vec::with_capacity(reps.len());
    for (idx, (rep, r)) in reps.into_iter().zip(solved).enumerate() {
        let (value, combination, duals) = r?;
        if worst.as_ref().map_or(true, |w| value > w.1 + TOLERANCE) {
            worst = Some((idx, value, duals));
        }
        table.push(StrategyEntry {
            coloring: rep,
            value,
            combination,
        });
    }
    let (idx, value, duals) = worst.expect("at least one coloring");
    out.value = value;
    out.worst_coloring = table[idx].coloring.clone();
    out.strategy = Some(table[idx].combination.clone());
    if value <= epsilon + TOLERANCE {
        out.table = table;
    } else {
        out.verdict = Verdict::Fails;
        out.adversary = cols
            .iter()
            .zip(duals)
            .filter(|(_, w)| *w > TOLERANCE)
            .map(|(&(color, high, low), weight)| AdversaryColumn {
                color,
                high,
                low,
                weight,
            })
            .collect();
    }
    Ok(out)
}

/// Oscillation of the averaged indicator colorings of `combination` on
/// `embeddings(A, B)`, maximized over colors.
fn averaged_oscillation(
    c: &Structure,
    b: &Structure,
    inner: &[Embedding],
    domain: &[Embedding],
    coloring: &[usize],
    k: usize,
    combination: &ConvexCombination,
) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for j in 0..k {
        let mut averaged = vec![0.0; inner.len()];
        for (w, copy) in combination.weights.iter().zip(&combination.copies) {
            if !is_embedding(copy.map(), b, c) {
                return Err(format!("{copy} is not an embedding of B into C"));
            }
            for (p, x) in inner.iter().enumerate() {
                let i = domain
                    .binary_search(&copy.compose(x))
                    .map_err(|_| "composite missing from the domain".to_string())?;
                if coloring[i] == j {
                    averaged[p] += w;
                }
            }
        }
        worst = worst.max(super::oscillation(averaged.into_iter()));
    }
    Ok(worst)
}

/// Independent re-check of a convex outcome using brute-force symmetry.
pub fn verify_convex(
    c: &Structure,
    a: &Structure,
    b: &Structure,
    outcome: &ConvexOutcome,
    budget: &Budget,
) -> Result<(), String> {
    use crate::structures::embeddings;
    let domain = embeddings(a, c).map_err(|e| e.to_string())?;
    let inner = embeddings(a, b).map_err(|e| e.to_string())?;
    let copies = embeddings(b, c).map_err(|e| e.to_string())?;
    let k = outcome.colors;
    if copies.is_empty() {
        return Err("B does not embed in C".into());
    }
    match outcome.verdict {
        Verdict::DegenerateHolds => {
            return if inner.is_empty() { Ok(()) } else { Err("outcome is not degenerate".into()) };
        }
        Verdict::Holds | Verdict::Fails => {}
        Verdict::PreconditionFailed => return Err("unexpected verdict".into()),
    }
    let coloring_ok = |col: &[usize]| col.len() == domain.len() && col.iter().all(|&v| v < k);
    if outcome.verdict == Verdict::Fails {
        if outcome.value <= outcome.epsilon + TOLERANCE {
            return Err("recorded value does not exceed epsilon".into());
        }
        let col = &outcome.worst_coloring;
        if !coloring_ok(col) {
            return Err("worst coloring is malformed".into());
        }
        let total: f64 = outcome.adversary.iter().map(|x| x.weight).sum();
        if (total - 1.0).abs() > GAP_TOLERANCE || outcome.adversary.iter().any(|x| x.weight < 0.0) {
            return Err("adversary weights are not a distribution".into());
        }
        // Every copy concedes at least the adversary's guarantee.
        for copy in &copies {
            let mut gain = 0.0;
            for x in &outcome.adversary {
                if x.color >= k || x.high >= inner.len() || x.low >= inner.len() || x.high == x.low {
                    return Err("malformed adversary column".into());
                }
                let at = |p: usize| domain.binary_search(&copy.compose(&inner[p])).map_err(|_| "composite missing".to_string());
                let hi = (col[at(x.high)?] == x.color) as i32 as f64;
                let lo = (col[at(x.low)?] == x.color) as i32 as f64;
                gain += x.weight * (hi - lo);
            }
            if gain <= outcome.epsilon + TOLERANCE - GAP_TOLERANCE {
                return Err(format!("copy {copy} concedes only {gain}"));
            }
        }
        return Ok(());
    }
    // Holds: every table entry works, and every coloring is a symmetric image
    // of a table entry.
    let mut table: HashMap<&[usize], &StrategyEntry> = HashMap::new();
    for entry in &outcome.table {
        if !coloring_ok(&entry.coloring) {
            return Err("malformed table coloring".into());
        }
        entry.combination.validate()?;
        let osc = averaged_oscillation(c, b, &inner, &domain, &entry.coloring, k, &entry.combination)?;
        if osc > outcome.epsilon + TOLERANCE {
            return Err(format!("table entry oscillates by {osc}"));
        }
        table.insert(&entry.coloring, entry);
    }
    let group = brute_force_group(c, budget).map_err(|e| e.to_string())?;
    let perms: Vec<Vec<usize>> = group
        .iter()
        .map(|g| {
            domain
                .iter()
                .map(|e| {
                    let moved = Embedding(e.map().iter().map(|&v| g[v]).collect());
                    domain.binary_search(&moved).unwrap()
                })
                .collect()
        })
        .collect();
    let total = (k as u128).checked_pow(domain.len() as u32).unwrap_or(u128::MAX);
    budget.check_candidates("colorings", total).map_err(|e| e.to_string())?;
    let mut col = vec![0usize; domain.len()];
    loop {
        budget.charge(1).map_err(|e| e.to_string())?;
        let found = perms
            .iter()
            .any(|p| table.contains_key(renamed(&col, p, k).as_slice()));
        if !found {
            return Err(format!("coloring {col:?} is not covered by the table"));
        }
        let mut i = col.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            col[i] += 1;
            if col[i] < k {
                break;
            }
            col[i] = 0;
        }
    }
}

/// Automorphisms by filtering all permutations.
fn brute_force_group(c: &Structure, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let n = c.size();
    let count: u128 = (1..=n as u128).product();
    budget.check_candidates("permutations", count)?;
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if is_embedding(&perm, c, c) {
            out.push(perm.clone());
        }
        // next permutation in lexicographic order
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return Ok(out);
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn four_points_pigeonhole() {
        let (c, a, bb) = (Structure::pure_set(4), Structure::pure_set(1), Structure::pure_set(2));
        let out = convex_arrow(&c, &a, &bb, 0.3, 2, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Holds);
        assert!(out.value.abs() < 1e-9);
        assert_eq!(verify_convex(&c, &a, &bb, &out, &b()), Ok(()));
    }

    #[test]
    fn mixing_helps_on_two_points() {
        // one copy up to symmetry but two embeddings; averaging the swap
        // cancels the oscillation
        let (c, a, bb) = (Structure::pure_set(2), Structure::pure_set(1), Structure::pure_set(2));
        let out = convex_arrow(&c, &a, &bb, 0.1, 2, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Holds);
        assert!(out.value.abs() < 1e-9);
        assert_eq!(verify_convex(&c, &a, &bb, &out, &b()), Ok(()));
    }

    #[test]
    fn rigid_two_chain_fails_below_one() {
        let (c, a, bb) = (Structure::chain(2), Structure::chain(1), Structure::chain(2));
        let out = convex_arrow(&c, &a, &bb, 0.5, 2, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Fails);
        assert!((out.value - 1.0).abs() < 1e-9);
        assert_eq!(verify_convex(&c, &a, &bb, &out, &b()), Ok(()));
        let out = convex_arrow(&c, &a, &bb, 1.0, 2, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Holds);
        assert_eq!(verify_convex(&c, &a, &bb, &out, &b()), Ok(()));
    }

    #[test]
    fn ramsey_host_needs_one_copy() {
        let (c, a, bb) = (Structure::chain(6), Structure::chain(2), Structure::chain(3));
        let out = convex_arrow(&c, &a, &bb, 0.05, 2, &b()).unwrap();
        assert_eq!(out.verdict, Verdict::Holds);
        assert!(out.table.iter().all(|e| e.combination.copies.len() == 1));
    }
}
