//! Embedding tests and enumeration by backtracking.

use std::ops::ControlFlow;

use super::{Embedding, Structure};
use crate::error::{Error, Result};

/// Visit every tuple over `0..=last` that mentions `last`, in lexicographic
/// order, stopping early when `visit` returns `false`.
fn tuples_through(last: usize, arity: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    let mut t = vec![0usize; arity];
    loop {
        if t.contains(&last) && !visit(&t) {
            return false;
        }
        let mut i = arity;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if t[i] < last {
                t[i] += 1;
                break;
            }
            t[i] = 0;
        }
    }
}

/// Does the partial map `f[0..=last]` preserve and reflect every tuple that
/// mentions source vertex `last`?
fn consistent_at(f: &[usize], last: usize, a: &Structure, b: &Structure) -> bool {
    let mut image = Vec::new();
    (0..a.relation_count()).all(|rel| {
        tuples_through(last, a.arity(rel), |t| {
            image.clear();
            image.extend(t.iter().map(|&v| f[v]));
            a.holds(rel, t) == b.holds(rel, &image)
        })
    })
}

/// True iff `f` is an injective map from the vertices of `a` into `b` that
/// preserves and reflects every relation. Any malformed input yields `false`.
pub fn is_embedding(f: &[usize], a: &Structure, b: &Structure) -> bool {
    if f.len() != a.size() || a.signature() != b.signature() {
        return false;
    }
    let mut seen = vec![false; b.size()];
    for &v in f {
        if v >= b.size() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    (0..a.size()).all(|last| consistent_at(f, last, a, b))
}

fn check_signatures(a: &Structure, b: &Structure) -> Result<()> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch(format!(
            "`{}` vs `{}`",
            a.signature(),
            b.signature()
        )));
    }
    Ok(())
}

/// Visit all embeddings of `a` into `b` in lexicographic order of the map.
pub fn for_each_embedding<B>(
    a: &Structure,
    b: &Structure,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> Result<Option<B>> {
    check_signatures(a, b)?;
    if a.size() > b.size() {
        return Ok(None);
    }
    let mut f = vec![0usize; a.size()];
    let mut used = vec![false; b.size()];
    fn go<B>(
        depth: usize,
        f: &mut Vec<usize>,
        used: &mut Vec<bool>,
        a: &Structure,
        b: &Structure,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        if depth == a.size() {
            return visit(f);
        }
        for t in 0..b.size() {
            if used[t] {
                continue;
            }
            f[depth] = t;
            if consistent_at(&f[..=depth], depth, a, b) {
                used[t] = true;
                let flow = go(depth + 1, f, used, a, b, visit);
                used[t] = false;
                flow?;
            }
        }
        ControlFlow::Continue(())
    }
    Ok(match go(0, &mut f, &mut used, a, b, &mut visit) {
        ControlFlow::Break(x) => Some(x),
        ControlFlow::Continue(()) => None,
    })
}

/// All embeddings of `a` into `b`, in lexicographic order of the map.
pub fn embeddings(a: &Structure, b: &Structure) -> Result<Vec<Embedding>> {
    let mut out = Vec::new();
    for_each_embedding::<()>(a, b, |f| {
        out.push(Embedding(f.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Does `a` embed into `b` at all?
pub fn embeds(a: &Structure, b: &Structure) -> Result<bool> {
    Ok(for_each_embedding(a, b, |_| ControlFlow::Break(()))?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Signature;

    #[test]
    fn identity_on_k2() {
        let k2 = Structure::complete_graph(2);
        assert!(is_embedding(&[0, 1], &k2, &k2));
    }

    #[test]
    fn edge_onto_non_edge_is_rejected() {
        let p3 = Structure::path_graph(3);
        assert!(!is_embedding(&[0, 2], &Structure::complete_graph(2), &p3));
    }

    #[test]
    fn non_injective_and_out_of_range_are_rejected() {
        let s = Structure::pure_set(3);
        assert!(!is_embedding(&[1, 1], &Structure::pure_set(2), &s));
        assert!(!is_embedding(&[0, 3], &Structure::pure_set(2), &s));
        assert!(!is_embedding(&[0], &Structure::pure_set(2), &s));
    }

    #[test]
    fn counts() {
        assert_eq!(embeddings(&Structure::pure_set(1), &Structure::pure_set(3)).unwrap().len(), 3);
        assert_eq!(embeddings(&Structure::chain(2), &Structure::chain(5)).unwrap().len(), 10);
        let k2_in_p3 = embeddings(&Structure::complete_graph(2), &Structure::path_graph(3)).unwrap();
        let maps: Vec<_> = k2_in_p3.iter().map(|e| e.0.clone()).collect();
        assert_eq!(maps, vec![vec![0, 1], vec![1, 0], vec![1, 2], vec![2, 1]]);
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let r = embeddings(&Structure::chain(2), &Structure::complete_graph(3));
        assert!(matches!(r, Err(Error::SignatureMismatch(_))));
    }

    #[test]
    fn loops_and_ternary_relations_are_reflected() {
        let sig = Signature::from_pairs(&[("r", 3), ("l", 2)]).unwrap();
        let a = Structure::new(sig.clone(), 2, vec![vec![vec![0, 1, 1]], vec![vec![0, 0]]]).unwrap();
        let b = Structure::new(
            sig,
            3,
            vec![vec![vec![2, 0, 0], vec![1, 2, 2]], vec![vec![2, 2], vec![1, 1]]],
        )
        .unwrap();
        let maps: Vec<_> = embeddings(&a, &b).unwrap().into_iter().map(|e| e.0).collect();
        assert_eq!(maps, vec![vec![2, 0]]);
        assert!(maps.iter().all(|f| is_embedding(f, &a, &b)));
    }
}
