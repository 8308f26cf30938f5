//! Hereditary classes of finite structures ("ages"): membership,
//! level-by-level enumeration up to isomorphism, and bounded amalgamation
//! probes.

mod amalgamation;
mod enumerate;

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{embeds, parse_structure, Signature, Structure, Symbol};

pub use amalgamation::{
    amalgamation_probe, AmalgamationCounterexample, AmalgamationProperty, AmalgamationReport,
};
pub use enumerate::{enumerate_structures, enumerate_up_to};

/// Built-in axioms for a binary symbol.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Axioms {
    #[serde(default)]
    pub irreflexive: bool,
    #[serde(default)]
    pub symmetric: bool,
    #[serde(default)]
    pub antisymmetric: bool,
    /// Any two distinct vertices are related in at least one direction.
    #[serde(default)]
    pub total: bool,
    #[serde(default)]
    pub transitive: bool,
}

impl Axioms {
    pub fn is_empty(&self) -> bool {
        *self == Axioms::default()
    }

    fn flag_names(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (on, name) in [
            (self.irreflexive, "irreflexive"),
            (self.symmetric, "symmetric"),
            (self.antisymmetric, "antisymmetric"),
            (self.total, "total"),
            (self.transitive, "transitive"),
        ] {
            if on {
                out.push(name);
            }
        }
        out
    }

    fn set_flag(&mut self, flag: &str) -> bool {
        match flag {
            "irreflexive" => self.irreflexive = true,
            "symmetric" => self.symmetric = true,
            "antisymmetric" => self.antisymmetric = true,
            "total" => self.total = true,
            "transitive" => self.transitive = true,
            _ => return false,
        }
        true
    }

    /// Does the binary relation `rel` of `s` satisfy these axioms?
    fn satisfied(&self, s: &Structure, rel: usize) -> bool {
        let n = s.size();
        if self.irreflexive && (0..n).any(|v| s.holds(rel, &[v, v])) {
            return false;
        }
        for u in 0..n {
            for v in u + 1..n {
                let fwd = s.holds(rel, &[u, v]);
                let bwd = s.holds(rel, &[v, u]);
                if self.symmetric && fwd != bwd
                    || self.antisymmetric && fwd && bwd
                    || self.total && !fwd && !bwd
                {
                    return false;
                }
            }
        }
        if self.transitive {
            for t in s.tuples(rel) {
                let (x, y) = (t[0], t[1]);
                if (0..n).any(|z| s.holds(rel, &[y, z]) && !s.holds(rel, &[x, z])) {
                    return false;
                }
            }
        }
        true
    }
}

/// A hereditary class given by a signature, per-symbol axioms and a list of
/// forbidden induced substructures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgeSpec {
    signature: Arc<Signature>,
    axioms: Vec<Axioms>,
    forbidden: Vec<Structure>,
    name: Option<String>,
}

/// Names accepted by [`AgeSpec::catalog`].
pub const CATALOG: &[&str] = &[
    "set",
    "graph",
    "graph_kfree:<n>",
    "linear_order",
    "tournament",
    "digraph",
];

impl AgeSpec {
    pub fn new(
        signature: Signature,
        axioms: Vec<Axioms>,
        forbidden: Vec<Structure>,
        name: Option<String>,
    ) -> Result<Self> {
        if axioms.len() != signature.len() {
            return Err(Error::InvalidInput(format!(
                "expected axioms for {} symbols, got {}",
                signature.len(),
                axioms.len()
            )));
        }
        for (sym, ax) in signature.symbols().iter().zip(&axioms) {
            if !ax.is_empty() && sym.arity != 2 {
                return Err(Error::InvalidInput(format!(
                    "axioms apply to binary symbols only, `{}` has arity {}",
                    sym.name, sym.arity
                )));
            }
            if ax.symmetric && ax.antisymmetric && ax.total {
                return Err(Error::InvalidInput(format!(
                    "`{}` cannot be symmetric, antisymmetric and total at once",
                    sym.name
                )));
            }
        }
        for f in &forbidden {
            if f.signature() != &signature {
                return Err(Error::SignatureMismatch(format!(
                    "forbidden structure over `{}` in an age over `{}`",
                    f.signature(),
                    signature
                )));
            }
        }
        Ok(AgeSpec {
            signature: Arc::new(signature),
            axioms,
            forbidden,
            name,
        })
    }

    /// One of the built-in classes listed in [`CATALOG`].
    pub fn catalog(name: &str) -> Result<Self> {
        let binary = |sym: &str, ax: Axioms| {
            AgeSpec::new(
                Signature::from_pairs(&[(sym, 2)]).unwrap(),
                vec![ax],
                vec![],
                Some(name.to_string()),
            )
        };
        let graph_axioms = Axioms {
            irreflexive: true,
            symmetric: true,
            ..Axioms::default()
        };
        match name {
            "set" => AgeSpec::new(Signature::empty(), vec![], vec![], Some(name.into())),
            "graph" => binary("edge", graph_axioms),
            "linear_order" => binary(
                "lt",
                Axioms {
                    irreflexive: true,
                    antisymmetric: true,
                    total: true,
                    transitive: true,
                    ..Axioms::default()
                },
            ),
            "tournament" => binary(
                "arc",
                Axioms {
                    irreflexive: true,
                    antisymmetric: true,
                    total: true,
                    ..Axioms::default()
                },
            ),
            "digraph" => binary(
                "arc",
                Axioms {
                    irreflexive: true,
                    ..Axioms::default()
                },
            ),
            _ => {
                let k = name
                    .strip_prefix("graph_kfree:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "unknown age `{name}`; known: {}",
                            CATALOG.join(", ")
                        ))
                    })?;
                if k < 2 {
                    return Err(Error::InvalidInput(
                        "graph_kfree:<n> needs n >= 2".into(),
                    ));
                }
                AgeSpec::new(
                    Signature::from_pairs(&[("edge", 2)]).unwrap(),
                    vec![graph_axioms],
                    vec![Structure::complete_graph(k)],
                    Some(name.to_string()),
                )
            }
        }
    }

    /// Parse an age file. `load` resolves the paths listed on `forbidden:`
    /// lines.
    ///
    /// ```text
    /// # either a catalog base ...
    /// age: graph
    /// # ... or an explicit signature with axioms
    /// signature: edge/2
    /// axioms: edge irreflexive symmetric
    /// forbidden: k3.st
    /// ```
    pub fn parse(text: &str, mut load: impl FnMut(&str) -> Result<Structure>) -> Result<Self> {
        let mut base: Option<AgeSpec> = None;
        let mut signature: Option<Signature> = None;
        let mut axiom_lines: Vec<(usize, String, Vec<String>)> = Vec::new();
        let mut forbidden = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, rest) = trimmed
                .split_once(':')
                .ok_or_else(|| Error::syntax(line, 1, "expected `key: value`"))?;
            let rest = rest.trim();
            match key.trim() {
                "age" => {
                    if base.is_some() {
                        return Err(Error::syntax(line, 1, "duplicate `age:` line"));
                    }
                    base = Some(AgeSpec::catalog(rest)?);
                }
                "signature" => {
                    if signature.is_some() {
                        return Err(Error::syntax(line, 1, "duplicate `signature:` line"));
                    }
                    let mut symbols = Vec::new();
                    for tok in rest.split_whitespace() {
                        let (name, arity) = tok
                            .split_once('/')
                            .and_then(|(n, a)| Some((n, a.parse::<usize>().ok()?)))
                            .ok_or_else(|| {
                                Error::syntax(line, 1, format!("bad symbol `{tok}`"))
                            })?;
                        symbols.push(Symbol {
                            name: name.to_string(),
                            arity,
                        });
                    }
                    signature = Some(Signature::new(symbols)?);
                }
                "axioms" => {
                    let mut toks = rest.split_whitespace();
                    let sym = toks
                        .next()
                        .ok_or_else(|| Error::syntax(line, 1, "`axioms:` needs a symbol"))?;
                    axiom_lines.push((
                        line,
                        sym.to_string(),
                        toks.map(str::to_string).collect(),
                    ));
                }
                "forbidden" => {
                    for path in rest.split_whitespace() {
                        forbidden.push(load(path)?);
                    }
                }
                other => {
                    return Err(Error::syntax(line, 1, format!("unknown key `{other}`")));
                }
            }
        }
        let (signature, mut axioms, mut all_forbidden, name) = match (base, signature) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidInput(
                    "use either `age:` or `signature:`, not both".into(),
                ))
            }
            (Some(b), None) => (
                (*b.signature).clone(),
                b.axioms.clone(),
                b.forbidden.clone(),
                if forbidden.is_empty() && axiom_lines.is_empty() {
                    b.name.clone()
                } else {
                    None
                },
            ),
            (None, Some(sig)) => {
                let n = sig.len();
                (sig, vec![Axioms::default(); n], vec![], None)
            }
            (None, None) => {
                return Err(Error::InvalidInput(
                    "age file needs an `age:` or `signature:` line".into(),
                ))
            }
        };
        for (line, sym, flags) in axiom_lines {
            let idx = signature.index_of(&sym).ok_or_else(|| {
                Error::syntax(line, 1, format!("unknown symbol `{sym}` in axioms"))
            })?;
            for flag in flags {
                if !axioms[idx].set_flag(&flag) {
                    return Err(Error::syntax(line, 1, format!("unknown axiom `{flag}`")));
                }
            }
        }
        all_forbidden.extend(forbidden);
        AgeSpec::new(signature, axioms, all_forbidden, name)
    }

    /// Load from a file path, resolving forbidden structures relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        AgeSpec::parse(&text, |p| {
            let full = dir.join(p);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", full.display())))?;
            parse_structure(&text)
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub(crate) fn shared_signature(&self) -> Arc<Signature> {
        Arc::clone(&self.signature)
    }

    pub fn axioms(&self) -> &[Axioms] {
        &self.axioms
    }

    pub fn forbidden(&self) -> &[Structure] {
        &self.forbidden
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Short human description: the catalog name or the signature.
    pub fn describe(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!(
                "signature `{}` with {} forbidden structure(s)",
                self.signature,
                self.forbidden.len()
            ),
        }
    }

    /// Normal-form age file text with forbidden structures inlined as
    /// comments-free blocks; used for digests.
    pub fn to_text(&self) -> String {
        let mut out = format!("signature: {}\n", self.signature);
        for (sym, ax) in self.signature.symbols().iter().zip(&self.axioms) {
            if !ax.is_empty() {
                out.push_str(&format!("axioms: {} {}\n", sym.name, ax.flag_names().join(" ")));
            }
        }
        for f in &self.forbidden {
            out.push_str("forbidden:\n");
            out.push_str(&f.to_string());
        }
        out
    }

    pub fn check_signature(&self, s: &Structure) -> Result<()> {
        if s.signature() != &*self.signature {
            return Err(Error::SignatureMismatch(format!(
                "structure over `{}` in an age over `{}`",
                s.signature(),
                self.signature
            )));
        }
        Ok(())
    }

    /// Membership: all axioms hold and no forbidden structure embeds.
    pub fn member(&self, s: &Structure) -> Result<bool> {
        self.check_signature(s)?;
        Ok(self.member_unchecked(s))
    }

    pub(crate) fn member_unchecked(&self, s: &Structure) -> bool {
        self.axioms
            .iter()
            .enumerate()
            .all(|(rel, ax)| ax.is_empty() || ax.satisfied(s, rel))
            && self
                .forbidden
                .iter()
                .all(|f| !embeds(f, s).unwrap_or(false))
    }

    /// Error unless every structure is a member.
    pub fn require_members(&self, structures: &[(&str, &Structure)]) -> Result<()> {
        for (label, s) in structures {
            if !self.member(s)? {
                return Err(Error::InvalidInput(format!(
                    "structure {label} is not in the age {}",
                    self.describe()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_free_membership() {
        let spec = AgeSpec::catalog("graph_kfree:3").unwrap();
        assert!(spec.member(&Structure::cycle_graph(5)).unwrap());
        assert!(!spec.member(&Structure::complete_graph(4)).unwrap());
    }

    #[test]
    fn totality_fails_on_antichain() {
        let spec = AgeSpec::catalog("linear_order").unwrap();
        let antichain = Structure::new(spec.signature().clone(), 2, vec![vec![]]).unwrap();
        assert!(!spec.member(&antichain).unwrap());
        assert!(spec.member(&Structure::chain(4)).unwrap());
        let cyclic = Structure::new(
            spec.signature().clone(),
            3,
            vec![vec![vec![0, 1], vec![1, 2], vec![2, 0]]],
        )
        .unwrap();
        assert!(!spec.member(&cyclic).unwrap());
        assert!(AgeSpec::catalog("tournament").unwrap().member(&cyclic.clone()).is_err());
    }

    #[test]
    fn signature_mismatch_is_reported() {
        let spec = AgeSpec::catalog("graph").unwrap();
        assert!(matches!(
            spec.member(&Structure::chain(2)),
            Err(Error::SignatureMismatch(_))
        ));
    }

    #[test]
    fn unknown_catalog_name() {
        assert!(AgeSpec::catalog("poset").is_err());
        assert!(AgeSpec::catalog("graph_kfree:1").is_err());
    }

    #[test]
    fn age_file_with_forbidden_structures() {
        let text = "# triangle-free graphs\nsignature: edge/2\naxioms: edge irreflexive symmetric\nforbidden: k3.st\n";
        let spec = AgeSpec::parse(text, |p| {
            assert_eq!(p, "k3.st");
            Ok(Structure::complete_graph(3))
        })
        .unwrap();
        assert_eq!(spec.forbidden().len(), 1);
        assert!(spec.axioms()[0].symmetric && spec.axioms()[0].irreflexive);
        assert!(!spec.member(&Structure::complete_graph(3)).unwrap());
        assert!(spec.member(&Structure::path_graph(3)).unwrap());
    }

    #[test]
    fn age_file_catalog_base() {
        let spec = AgeSpec::parse("age: linear_order\n", |_| unreachable!()).unwrap();
        assert_eq!(spec, AgeSpec::catalog("linear_order").unwrap());
        assert!(AgeSpec::parse("age: graph\nsignature: edge/2\n", |_| unreachable!()).is_err());
        assert!(AgeSpec::parse("signature: r/3\naxioms: r symmetric\n", |_| unreachable!()).is_err());
        assert!(AgeSpec::parse("signature: r/2\naxioms: r reflexive\n", |_| unreachable!()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = AgeSpec::catalog("graph_kfree:4").unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<AgeSpec>(&json).unwrap(), spec);
    }
}
