mod common;

use common::{all_tuples, marked_isomorphic};
use fraisse_core::ages::{amalgamation_probe, enumerate_up_to, AgeSpec, AmalgamationProperty};
use fraisse_core::arrows::{classical_arrow, roelcke_valid, roelcke_witness};
use fraisse_core::patterns::{joint_embeddings, pattern_of, JointEmbedding};
use fraisse_core::structures::{
    canonical_form, embeddings, is_embedding, parse_structure, serialize_structure, Embedding, Signature, Structure,
};
use fraisse_core::Budget;
use proptest::prelude::*;
use proptest::sample::subsequence;

fn sig() -> Signature {
    Signature::from_pairs(&[("r", 2), ("p", 1), ("t", 3)]).unwrap()
}

/// A structure over `sig()` on 1..=`max` vertices with random tuples.
fn structure(max: usize) -> impl Strategy<Value = Structure> {
    (1..=max).prop_flat_map(|n| {
        let s = sig();
        let counts: Vec<usize> = s.symbols().iter().map(|x| n.pow(x.arity as u32)).collect();
        let bits = counts.iter().sum::<usize>();
        prop::collection::vec(prop::bool::weighted(0.3), bits).prop_map(move |mask| {
            let mut k = 0;
            let rels = s
                .symbols()
                .iter()
                .map(|x| {
                    all_tuples(n, x.arity)
                        .into_iter()
                        .filter(|_| {
                            k += 1;
                            mask[k - 1]
                        })
                        .collect()
                })
                .collect();
            Structure::new(s.clone(), n, rels).unwrap()
        })
    })
}

fn graph(max: usize) -> impl Strategy<Value = Structure> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            Structure::graph(n, &edges).unwrap()
        })
    })
}

fn with_permutation(s: impl Strategy<Value = Structure>) -> impl Strategy<Value = (Structure, Vec<usize>)> {
    s.prop_flat_map(|s| {
        let n = s.size();
        (Just(s), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_relabeling((s, perm) in with_permutation(structure(5))) {
        prop_assert_eq!(canonical_form(&s), canonical_form(&s.relabel(&perm)));
    }

    #[test]
    fn canonical_form_separates_isomorphism_types(a in structure(3), b in structure(3)) {
        let same = canonical_form(&a) == canonical_form(&b);
        prop_assert_eq!(same, marked_isomorphic(&a, &[], &b, &[]));
    }

    #[test]
    fn text_round_trip(s in structure(5)) {
        let text = serialize_structure(&s);
        let back = parse_structure(&text).unwrap();
        prop_assert_eq!(serialize_structure(&back), text);
        prop_assert_eq!(back, s);
    }

    #[test]
    fn embeddings_compose(c in graph(6), picks in subsequence((0..6).collect::<Vec<usize>>(), 1..=4)) {
        let picks: Vec<usize> = picks.into_iter().filter(|&v| v < c.size()).collect();
        prop_assume!(!picks.is_empty());
        let b = c.induced_substructure(&picks).unwrap();
        let a = b.induced_substructure(&[0]).unwrap();
        for f in embeddings(&a, &b).unwrap() {
            for g in embeddings(&b, &c).unwrap() {
                let gf: Embedding = g.compose(&f);
                prop_assert!(is_embedding(gf.map(), &a, &c));
            }
        }
    }

    #[test]
    fn patterns_are_isomorphism_invariant(seed in 0usize..1000, perm_seed in any::<u64>()) {
        let graphs = AgeSpec::catalog("graph").unwrap();
        let k1 = Structure::complete_graph(1);
        let e2 = Structure::empty_graph(2);
        let all = joint_embeddings(&graphs, &e2, &[k1], &Budget::default()).unwrap();
        let (code, j) = &all[seed % all.len()];
        let n = j.union.size();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut x = perm_seed;
        for i in (1..n).rev() {
            perm.swap(i, (x % (i as u64 + 1)) as usize);
            x /= i as u64 + 1;
        }
        let moved = JointEmbedding {
            union: j.union.relabel(&perm),
            parts: j.parts.iter().map(|p| Embedding(p.map().iter().map(|&v| perm[v]).collect())).collect(),
        };
        prop_assert_eq!(&pattern_of(&moved).unwrap(), code);
    }

    #[test]
    fn arrows_survive_extension(c in graph(5), extra in prop::collection::vec(any::<bool>(), 5), k in 1usize..=2) {
        let a = Structure::complete_graph(1);
        let b = Structure::complete_graph(2);
        let n = c.size();
        let mut edges: Vec<(usize, usize)> = c.tuples(0).iter().filter(|t| t[0] < t[1]).map(|t| (t[0], t[1])).collect();
        for (v, &on) in extra.iter().enumerate().take(n) {
            if on {
                edges.push((v, n));
            }
        }
        let bigger = Structure::graph(n + 1, &edges).unwrap();
        let budget = Budget::default();
        if classical_arrow(&c, &a, &b, k, &budget).unwrap().verdict.holds() {
            prop_assert!(classical_arrow(&bigger, &a, &b, k, &budget).unwrap().verdict.holds());
        }
    }

    #[test]
    fn fewer_colors_keep_arrows(c in graph(5), k in 2usize..=3) {
        let a = Structure::complete_graph(1);
        let b = Structure::empty_graph(2);
        let budget = Budget::default();
        if classical_arrow(&c, &a, &b, k, &budget).unwrap().verdict.holds() {
            prop_assert!(classical_arrow(&c, &a, &b, k - 1, &budget).unwrap().verdict.holds());
        }
    }

    #[test]
    fn graph_roelcke_witnesses_exist(a in graph(2), b in graph(3), z in graph(2)) {
        let spec = AgeSpec::catalog("graph").unwrap();
        prop_assume!(a.size() <= b.size());
        let out = roelcke_witness(&spec, &a, &b, &z, b.size() + z.size(), &Budget::default()).unwrap();
        let j = out.witness.expect("free join works");
        prop_assert!(roelcke_valid(&spec, &a, &b, &z, &j).is_ok());
    }
}

#[test]
fn enumerated_structures_are_hereditary() {
    let budget = Budget::default();
    for name in ["graph", "graph_kfree:3", "linear_order", "tournament", "digraph", "set"] {
        let spec = AgeSpec::catalog(name).unwrap();
        for level in enumerate_up_to(&spec, 4, &budget).unwrap() {
            for s in level {
                let n = s.size();
                for mask in 1u32..1 << n {
                    let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                    assert!(spec.member(&s.induced_substructure(&vs).unwrap()).unwrap(), "{name}");
                }
            }
        }
    }
}

#[test]
fn free_amalgamation_implies_amalgamation() {
    let budget = Budget::default();
    for name in ["set", "graph", "graph_kfree:3", "digraph", "linear_order", "tournament"] {
        let spec = AgeSpec::catalog(name).unwrap();
        let free = amalgamation_probe(&spec, AmalgamationProperty::FreeAmalgamation, 3, &budget).unwrap();
        let plain = amalgamation_probe(&spec, AmalgamationProperty::Amalgamation, 3, &budget).unwrap();
        if free.holds() {
            assert!(plain.holds(), "{name}");
        }
        if matches!(name, "set" | "graph" | "graph_kfree:3" | "digraph") {
            assert!(free.holds(), "{name}");
        }
        if matches!(name, "linear_order" | "tournament") {
            assert!(!free.holds() && plain.holds(), "{name}");
        }
    }
}
