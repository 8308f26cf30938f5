//! Brute-force reference implementations used as test oracles. Nothing here
//! calls the search code under test.
#![allow(dead_code)]

use std::collections::BTreeSet;

use fraisse_core::ages::AgeSpec;
use fraisse_core::structures::{Signature, Structure};

/// All injective maps `0..m -> 0..n`, in lexicographic order.
pub fn injections(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                go(m, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(m, n, &mut Vec::new(), &mut out);
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    injections(n, n)
}

/// Every tuple of length `arity` over `0..n`.
pub fn all_tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// `f` preserves and reflects every relation, checked on all tuples.
pub fn preserves(f: &[usize], a: &Structure, b: &Structure) -> bool {
    (0..a.relation_count()).all(|r| {
        all_tuples(a.size(), a.arity(r)).iter().all(|t| {
            let image: Vec<usize> = t.iter().map(|&v| f[v]).collect();
            a.holds(r, t) == b.holds(r, &image)
        })
    })
}

pub fn brute_embeddings(a: &Structure, b: &Structure) -> Vec<Vec<usize>> {
    injections(a.size(), b.size())
        .into_iter()
        .filter(|f| preserves(f, a, b))
        .collect()
}

/// Isomorphism of marked structures: a permutation carrying `u1` onto `u2`
/// and every part of the first onto the matching part of the second.
pub fn marked_isomorphic(u1: &Structure, p1: &[Vec<usize>], u2: &Structure, p2: &[Vec<usize>]) -> bool {
    if u1.size() != u2.size() || p1.len() != p2.len() {
        return false;
    }
    permutations(u1.size()).iter().any(|pi| {
        p1.iter()
            .zip(p2)
            .all(|(x, y)| x.len() == y.len() && x.iter().zip(y).all(|(&v, &w)| pi[v] == w))
            && preserves(pi, u1, u2)
    })
}

/// Every structure over `sig` on `n` vertices, relation by relation.
pub fn all_structures(sig: &Signature, n: usize) -> Vec<Structure> {
    let per_rel: Vec<Vec<Vec<usize>>> = sig.symbols().iter().map(|s| all_tuples(n, s.arity)).collect();
    let bits: usize = per_rel.iter().map(Vec::len).sum();
    assert!(bits <= 20, "too many structures to list");
    (0u64..1 << bits)
        .map(|mask| {
            let mut k = 0;
            let rels = per_rel
                .iter()
                .map(|tuples| {
                    let mut chosen = Vec::new();
                    for t in tuples {
                        if mask >> k & 1 == 1 {
                            chosen.push(t.clone());
                        }
                        k += 1;
                    }
                    chosen
                })
                .collect();
            Structure::new(sig.clone(), n, rels).unwrap()
        })
        .collect()
}

/// Members of the age on `n` vertices, one per isomorphism type.
pub fn brute_iso_types(spec: &AgeSpec, n: usize) -> Vec<Structure> {
    let mut reps: Vec<Structure> = Vec::new();
    for s in all_structures(spec.signature(), n) {
        if spec.member(&s).unwrap() && !reps.iter().any(|r| marked_isomorphic(r, &[], &s, &[])) {
            reps.push(s);
        }
    }
    reps
}

/// Number of joint embedding patterns of `a` and `zs`, by listing every
/// union-supported joint embedding and grouping by marked isomorphism.
pub fn brute_pattern_count(spec: &AgeSpec, a: &Structure, zs: &[Structure]) -> usize {
    let mut sources = vec![a.clone()];
    sources.extend(zs.iter().cloned());
    let lo = sources.iter().map(Structure::size).max().unwrap();
    let hi: usize = sources.iter().map(Structure::size).sum();
    let mut classes: Vec<(Structure, Vec<Vec<usize>>)> = Vec::new();
    for n in lo..=hi {
        for u in brute_iso_types(spec, n) {
            let maps: Vec<Vec<Vec<usize>>> = sources.iter().map(|s| brute_embeddings(s, &u)).collect();
            let total: usize = maps.iter().map(Vec::len).product();
            for mut code in 0..total {
                let parts: Vec<Vec<usize>> = maps
                    .iter()
                    .map(|m| {
                        let p = m[code % m.len()].clone();
                        code /= m.len();
                        p
                    })
                    .collect();
                let covered: BTreeSet<usize> = parts.iter().flatten().copied().collect();
                if covered.len() == n && !classes.iter().any(|(v, q)| marked_isomorphic(v, q, &u, &parts)) {
                    classes.push((u.clone(), parts));
                }
            }
        }
    }
    classes.len()
}

/// `C → (B)^A_k` by listing all `k^N` colorings of the copies of `A`.
pub fn exhaustive_arrow(c: &Structure, a: &Structure, b: &Structure, k: usize) -> bool {
    let domain = brute_embeddings(a, c);
    let copies = brute_embeddings(b, c);
    let inner = brute_embeddings(a, b);
    if copies.is_empty() {
        return false;
    }
    let sets: Vec<Vec<usize>> = copies
        .iter()
        .map(|g| {
            inner
                .iter()
                .map(|f| {
                    let x: Vec<usize> = f.iter().map(|&v| g[v]).collect();
                    domain.iter().position(|d| *d == x).unwrap()
                })
                .collect()
        })
        .collect();
    let n = domain.len();
    let total = (k as u64).pow(n as u32);
    assert!(total <= 1 << 22, "too many colorings");
    let mut coloring = vec![0usize; n];
    for mut code in 0..total {
        for x in coloring.iter_mut() {
            *x = (code % k as u64) as usize;
            code /= k as u64;
        }
        let mono = sets
            .iter()
            .any(|set| set.iter().all(|&i| coloring[i] == coloring[set[0]]));
        if !mono {
            return false;
        }
    }
    true
}

/// Solve `m x = rhs` by Gaussian elimination with partial pivoting.
fn solve_linear(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Value of the game in which the row player minimizes `x^T m y`, by
/// enumerating square subsystems (Shapley–Snow).
pub fn minimax_value(m: &[Vec<f64>]) -> f64 {
    let rows = m.len();
    let cols = m[0].len();
    let mut best = f64::INFINITY;
    for k in 1..=rows.min(cols) {
        for r in subsets(rows, k) {
            for s in subsets(cols, k) {
                // unknowns x_r (k of them) and v: Σ x_i m[i][j] - v = 0, Σ x_i = 1
                let mut a = vec![vec![0.0; k + 1]; k + 1];
                let mut rhs = vec![0.0; k + 1];
                for (e, &j) in s.iter().enumerate() {
                    for (i, &ri) in r.iter().enumerate() {
                        a[e][i] = m[ri][j];
                    }
                    a[e][k] = -1.0;
                }
                for i in 0..k {
                    a[k][i] = 1.0;
                }
                rhs[k] = 1.0;
                let Some(sol) = solve_linear(a, rhs) else { continue };
                if sol[..k].iter().any(|&x| x < -1e-9) {
                    continue;
                }
                let mut x = vec![0.0; rows];
                for (i, &ri) in r.iter().enumerate() {
                    x[ri] = sol[i].max(0.0);
                }
                let guarantee = (0..cols)
                    .map(|j| (0..rows).map(|i| x[i] * m[i][j]).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max);
                best = best.min(guarantee);
            }
        }
    }
    best
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn falling(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i))
}

/// Joint embedding patterns of an `m`-set and a `k`-set: choose the
/// overlap size `j`, which points of each side overlap, and how.
pub fn pure_set_patterns(m: usize, k: usize) -> usize {
    (0..=m.min(k)).map(|j| binomial(m, j) * binomial(k, j) * falling(j, j)).sum()
}
