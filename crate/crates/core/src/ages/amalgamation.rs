use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::{enumerate_up_to, AgeSpec};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::structures::{embeddings, Embedding, Structure};
use crate::unions::Unions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmalgamationProperty {
    JointEmbedding,
    Amalgamation,
    FreeAmalgamation,
}

impl std::str::FromStr for AmalgamationProperty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "joint-embedding" | "jep" => Ok(Self::JointEmbedding),
            "amalgamation" | "ap" => Ok(Self::Amalgamation),
            "free-amalgamation" | "free" => Ok(Self::FreeAmalgamation),
            _ => Err(Error::InvalidInput(format!(
                "unknown property `{s}` (joint-embedding, amalgamation, free-amalgamation)"
            ))),
        }
    }
}

/// An instance with no completion inside the searched range. For joint
/// embedding `a` and the maps are absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamationCounterexample {
    pub a: Option<Structure>,
    pub b: Structure,
    pub c: Structure,
    pub f: Option<Embedding>,
    pub g: Option<Embedding>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamationReport {
    pub property: AmalgamationProperty,
    pub bound: usize,
    /// Largest `m` such that every instance with all sizes at most `m` has a
    /// completion.
    pub holds_up_to: usize,
    /// Completions are searched on at most |B|+|C| vertices.
    pub completion_cap: String,
    pub instances_checked: u64,
    pub counterexample: Option<AmalgamationCounterexample>,
}

impl AmalgamationReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Search every instance with all sizes at most `bound`, by increasing
/// largest size, for one without a completion in the age.
pub fn amalgamation_probe(
    spec: &AgeSpec,
    property: AmalgamationProperty,
    bound: usize,
    budget: &Budget,
) -> Result<AmalgamationReport> {
    if bound == 0 {
        return Err(Error::InvalidInput("amalgamation bound must be at least 1".into()));
    }
    let levels = enumerate_up_to(spec, bound, budget)?;
    let mut report = AmalgamationReport {
        property,
        bound,
        holds_up_to: bound,
        completion_cap: "|B|+|C|".into(),
        instances_checked: 0,
        counterexample: None,
    };
    for m in 1..=bound {
        let found = match property {
            AmalgamationProperty::JointEmbedding => jep_level(spec, &levels, m, budget, &mut report)?,
            _ => ap_level(spec, &levels, m, property, budget, &mut report)?,
        };
        if let Some(cx) = found {
            report.holds_up_to = m - 1;
            report.counterexample = Some(cx);
            break;
        }
    }
    Ok(report)
}

fn pairs_at(levels: &[Vec<Structure>], lo: usize, m: usize) -> Vec<(&Structure, &Structure)> {
    let mut out = Vec::new();
    for bs in lo..=m {
        for cs in lo..=m {
            if bs.max(cs) != m {
                continue;
            }
            for b in &levels[bs - 1] {
                for c in &levels[cs - 1] {
                    out.push((b, c));
                }
            }
        }
    }
    out
}

fn jep_level(
    spec: &AgeSpec,
    levels: &[Vec<Structure>],
    m: usize,
    budget: &Budget,
    report: &mut AmalgamationReport,
) -> Result<Option<AmalgamationCounterexample>> {
    for (b, c) in pairs_at(levels, 1, m) {
        report.instances_checked += 1;
        let unions = Unions::new(spec, vec![b, c], budget);
        if unions.for_each(|_, _| ControlFlow::Break(()))?.is_none() {
            return Ok(Some(AmalgamationCounterexample {
                a: None,
                b: b.clone(),
                c: c.clone(),
                f: None,
                g: None,
            }));
        }
    }
    Ok(None)
}

fn ap_level(
    spec: &AgeSpec,
    levels: &[Vec<Structure>],
    m: usize,
    property: AmalgamationProperty,
    budget: &Budget,
    report: &mut AmalgamationReport,
) -> Result<Option<AmalgamationCounterexample>> {
    let free = property == AmalgamationProperty::FreeAmalgamation;
    for a_size in 1..=m {
        for a in &levels[a_size - 1] {
            for (b, c) in pairs_at(levels, a_size, m) {
                let fs = embeddings(a, b)?;
                let gs = embeddings(a, c)?;
                for f in &fs {
                    for g in &gs {
                        report.instances_checked += 1;
                        let mut unions = Unions::new(spec, vec![b, c], budget);
                        for (i, &gv) in g.map().iter().enumerate() {
                            unions.forced[1][gv] = Some((0, f.map()[i]));
                        }
                        if free {
                            unions.identify = false;
                            unions.cross_tuples = false;
                        }
                        if unions.for_each(|_, _| ControlFlow::Break(()))?.is_none() {
                            return Ok(Some(AmalgamationCounterexample {
                                a: Some(a.clone()),
                                b: b.clone(),
                                c: c.clone(),
                                f: Some(f.clone()),
                                g: Some(g.clone()),
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use AmalgamationProperty::*;

    fn probe(name: &str, p: AmalgamationProperty, bound: usize) -> AmalgamationReport {
        amalgamation_probe(&AgeSpec::catalog(name).unwrap(), p, bound, &Budget::default()).unwrap()
    }

    #[test]
    fn graphs_have_free_amalgamation() {
        let r = probe("graph", FreeAmalgamation, 3);
        assert!(r.holds());
        assert_eq!(r.holds_up_to, 3);
    }

    #[test]
    fn orders_amalgamate_but_not_freely() {
        let r = probe("linear_order", FreeAmalgamation, 2);
        assert!(!r.holds());
        assert_eq!(r.holds_up_to, 1);
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.a.unwrap().size(), 1);
        assert!(probe("linear_order", Amalgamation, 3).holds());
        assert!(probe("linear_order", JointEmbedding, 3).holds());
    }

    #[test]
    fn triangle_free_graphs_amalgamate_freely() {
        assert!(probe("graph_kfree:3", FreeAmalgamation, 3).holds());
        assert!(probe("tournament", Amalgamation, 3).holds());
        assert!(!probe("tournament", FreeAmalgamation, 2).holds());
    }

    #[test]
    fn failure_of_amalgamation_is_detected() {
        // Graphs without an induced path on three vertices, plus the forbidden
        // 2K2: 2K2-free and P3-free graphs are disjoint unions of at most one
        // clique; two isolated points over an edge cannot be amalgamated
        // without creating P3 or 2K2.
        let text = "age: graph\n";
        let base = AgeSpec::parse(text, |_| unreachable!()).unwrap();
        let spec = AgeSpec::new(
            base.signature().clone(),
            base.axioms().to_vec(),
            vec![
                Structure::path_graph(3),
                Structure::graph(4, &[(0, 1), (2, 3)]).unwrap(),
            ],
            None,
        )
        .unwrap();
        let r = amalgamation_probe(&spec, Amalgamation, 3, &Budget::default()).unwrap();
        assert!(!r.holds());
    }
}
