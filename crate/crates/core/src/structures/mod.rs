//! Finite relational structures over the vertex set `0..n`.

mod canon;
mod embed;
mod format;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use canon::{canonical_form, canonical_labeling, CanonicalCode};
pub(crate) use canon::all_automorphisms;
pub use embed::{embeddings, embeds, for_each_embedding, is_embedding};
pub use format::{parse_structure, serialize_structure};

/// Largest `n^arity` for which a relation keeps a dense membership bitmap.
const DENSE_LIMIT: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of relation symbols with their arities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        for (i, s) in symbols.iter().enumerate() {
            if !is_identifier(&s.name) {
                return Err(Error::InvalidInput(format!(
                    "`{}` is not a valid symbol name",
                    s.name
                )));
            }
            if s.arity == 0 {
                return Err(Error::InvalidInput(format!(
                    "symbol `{}` must have positive arity",
                    s.name
                )));
            }
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::InvalidInput(format!(
                    "symbol `{}` declared twice",
                    s.name
                )));
            }
        }
        Ok(Signature { symbols })
    }

    /// Convenience constructor from `(name, arity)` pairs.
    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Signature::new(
            pairs
                .iter()
                .map(|&(name, arity)| Symbol {
                    name: name.to_string(),
                    arity,
                })
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    /// This signature followed by `count` fresh unary mark symbols.
    pub(crate) fn with_marks(&self, count: usize) -> Signature {
        let mut symbols = self.symbols.clone();
        symbols.extend((0..count).map(|i| Symbol {
            name: format!("__mark{i}"),
            arity: 1,
        }));
        Signature { symbols }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}/{}", s.name, s.arity)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Relation {
    arity: usize,
    /// Sorted, deduplicated.
    tuples: Vec<Vec<usize>>,
    dense: Option<Vec<u64>>,
}

fn dense_index(tuple: &[usize], n: usize) -> usize {
    tuple.iter().rev().fold(0, |acc, &v| acc * n + v)
}

impl Relation {
    fn new(arity: usize, mut tuples: Vec<Vec<usize>>, n: usize) -> Relation {
        tuples.sort_unstable();
        tuples.dedup();
        let cells = n.checked_pow(arity as u32).filter(|&c| c <= DENSE_LIMIT);
        let dense = cells.map(|cells| {
            let mut bits = vec![0u64; cells.div_ceil(64).max(1)];
            for t in &tuples {
                let i = dense_index(t, n);
                bits[i / 64] |= 1 << (i % 64);
            }
            bits
        });
        Relation {
            arity,
            tuples,
            dense,
        }
    }

    fn contains(&self, tuple: &[usize], n: usize) -> bool {
        match &self.dense {
            Some(bits) => {
                let i = dense_index(tuple, n);
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            None => self
                .tuples
                .binary_search_by(|t| t.as_slice().cmp(tuple))
                .is_ok(),
        }
    }
}

/// A finite relational structure on the vertex set `0..size`.
///
/// Immutable once built; the signature is shared behind an `Arc` so that
/// clones and substructures stay cheap.
#[derive(Clone)]
pub struct Structure {
    signature: Arc<Signature>,
    size: usize,
    relations: Vec<Relation>,
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self.signature == other.signature
            && self
                .relations
                .iter()
                .zip(&other.relations)
                .all(|(r, s)| r.tuples == s.tuples)
    }
}

impl Eq for Structure {}

impl Hash for Structure {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.size.hash(state);
        for r in &self.relations {
            r.tuples.hash(state);
        }
    }
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Structure({:?})", serialize_structure(self))
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_structure(self))
    }
}

impl Structure {
    /// Build a structure, validating every invariant.
    ///
    /// `relations[i]` holds the tuples of symbol `i`; duplicates are merged.
    pub fn new(
        signature: impl Into<Arc<Signature>>,
        size: usize,
        relations: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let signature = signature.into();
        if size == 0 {
            return Err(Error::InvalidInput("structures must be non-empty".into()));
        }
        if relations.len() != signature.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} relations, got {}",
                signature.len(),
                relations.len()
            )));
        }
        for (sym, tuples) in signature.symbols().iter().zip(&relations) {
            for t in tuples {
                if t.len() != sym.arity {
                    return Err(Error::InvalidInput(format!(
                        "tuple {:?} has length {} but `{}` has arity {}",
                        t,
                        t.len(),
                        sym.name,
                        sym.arity
                    )));
                }
                if let Some(&v) = t.iter().find(|&&v| v >= size) {
                    return Err(Error::InvalidInput(format!(
                        "vertex {v} out of range for size {size}"
                    )));
                }
            }
        }
        Ok(Self::from_parts_unchecked(signature, size, relations))
    }

    pub(crate) fn from_parts_unchecked(
        signature: Arc<Signature>,
        size: usize,
        relations: Vec<Vec<Vec<usize>>>,
    ) -> Self {
        let relations = signature
            .symbols()
            .iter()
            .zip(relations)
            .map(|(sym, tuples)| Relation::new(sym.arity, tuples, size))
            .collect();
        Structure {
            signature,
            size,
            relations,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub(crate) fn shared_signature(&self) -> Arc<Signature> {
        Arc::clone(&self.signature)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.relations[rel].arity
    }

    pub fn tuples(&self, rel: usize) -> &[Vec<usize>] {
        &self.relations[rel].tuples
    }

    pub fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].contains(tuple, self.size)
    }

    /// All relation tuples, cloned, in signature order.
    pub fn relation_lists(&self) -> Vec<Vec<Vec<usize>>> {
        self.relations.iter().map(|r| r.tuples.clone()).collect()
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(|r| r.tuples.len()).sum()
    }

    /// The substructure induced on `vertices`, listed in ascending order.
    pub fn induced_substructure(&self, vertices: &[usize]) -> Result<Structure> {
        let mut vs = vertices.to_vec();
        vs.sort_unstable();
        vs.dedup();
        if vs.is_empty() {
            return Err(Error::InvalidInput(
                "induced substructure needs a non-empty vertex set".into(),
            ));
        }
        if let Some(&v) = vs.iter().find(|&&v| v >= self.size) {
            return Err(Error::InvalidInput(format!(
                "vertex {v} out of range for size {}",
                self.size
            )));
        }
        Ok(self.restrict(&vs))
    }

    /// The structure on `order.len()` vertices whose vertex `i` is
    /// `order[i]`. `order` must be duplicate-free and in range.
    pub(crate) fn restrict(&self, order: &[usize]) -> Structure {
        let mut position = vec![usize::MAX; self.size];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let relations = self
            .relations
            .iter()
            .map(|r| {
                r.tuples
                    .iter()
                    .filter(|t| t.iter().all(|&v| position[v] != usize::MAX))
                    .map(|t| t.iter().map(|&v| position[v]).collect())
                    .collect()
            })
            .collect();
        Structure::from_parts_unchecked(self.shared_signature(), order.len(), relations)
    }

    /// The image of this structure under the vertex permutation `perm`
    /// (vertex `v` becomes `perm[v]`).
    pub fn relabel(&self, perm: &[usize]) -> Structure {
        assert_eq!(perm.len(), self.size, "permutation length mismatch");
        let relations = self
            .relations
            .iter()
            .map(|r| {
                r.tuples
                    .iter()
                    .map(|t| t.iter().map(|&v| perm[v]).collect())
                    .collect()
            })
            .collect();
        Structure::from_parts_unchecked(self.shared_signature(), self.size, relations)
    }

    /// Expansion by one unary mark per entry of `marks`, each holding on
    /// exactly the listed vertex.
    pub(crate) fn with_marks(&self, marks: &[usize]) -> Structure {
        let signature = Arc::new(self.signature.with_marks(marks.len()));
        let mut relations = self.relation_lists();
        relations.extend(marks.iter().map(|&v| vec![vec![v]]));
        Structure::from_parts_unchecked(signature, self.size, relations)
    }

    /// Hex SHA-256 of the normalized text serialization.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(serialize_structure(self).as_bytes()))
    }

    pub fn pure_set(n: usize) -> Structure {
        Structure::new(Signature::empty(), n, vec![]).expect("valid pure set")
    }

    /// The `n`-element chain `0 < 1 < ... < n-1` over the symbol `lt`.
    pub fn chain(n: usize) -> Structure {
        let lt = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| vec![i, j]))
            .collect();
        Structure::new(Signature::from_pairs(&[("lt", 2)]).unwrap(), n, vec![lt])
            .expect("valid chain")
    }

    /// A simple graph over the symbol `edge`; each edge is stored in both
    /// directions.
    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Result<Structure> {
        let tuples = edges
            .iter()
            .flat_map(|&(u, v)| [vec![u, v], vec![v, u]])
            .collect();
        Structure::new(Signature::from_pairs(&[("edge", 2)])?, n, vec![tuples])
    }

    pub fn complete_graph(n: usize) -> Structure {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Structure::graph(n, &edges).expect("valid complete graph")
    }

    pub fn empty_graph(n: usize) -> Structure {
        Structure::graph(n, &[]).expect("valid empty graph")
    }

    pub fn path_graph(n: usize) -> Structure {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Structure::graph(n, &edges).expect("valid path")
    }

    pub fn cycle_graph(n: usize) -> Structure {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Structure::graph(n, &edges).expect("valid cycle")
    }
}

/// An embedding given by its vertex map: vertex `v` of the source goes to
/// `self.0[v]` in the target.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding(pub Vec<usize>);

impl Embedding {
    pub fn map(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &Embedding) -> Embedding {
        Embedding(inner.0.iter().map(|&v| self.0[v]).collect())
    }

    /// Image vertices, sorted.
    pub fn image(&self) -> Vec<usize> {
        let mut im = self.0.clone();
        im.sort_unstable();
        im
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}
