use serde::{Deserialize, Serialize};

use super::{classical_arrow, ClassicalOutcome};
use crate::ages::{enumerate_structures, AgeSpec};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::structures::Structure;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedCandidate {
    pub c: Structure,
    pub outcome: ClassicalOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowSearchOutcome {
    pub found: Option<Structure>,
    pub outcome: Option<ClassicalOutcome>,
    /// Every candidate scanned before `found`, with its failing certificate.
    pub rejected: Vec<RejectedCandidate>,
    pub max_n: usize,
}

/// Scan the age level by level, in canonical order, for the first `C` with
/// `C → (B)^A_k`.
pub fn arrow_search(
    spec: &AgeSpec,
    a: &Structure,
    b: &Structure,
    k: usize,
    max_n: usize,
    budget: &Budget,
) -> Result<ArrowSearchOutcome> {
    crate::patterns::check_members(spec, &[("A", a), ("B", b)])?;
    if max_n < b.size() {
        return Err(Error::InvalidInput(format!(
            "max_n = {max_n} is below |B| = {}",
            b.size()
        )));
    }
    let mut rejected = Vec::new();
    for n in b.size()..=max_n {
        for c in enumerate_structures(spec, n, budget)? {
            let outcome = classical_arrow(&c, a, b, k, budget)?;
            if outcome.verdict.holds() {
                return Ok(ArrowSearchOutcome {
                    found: Some(c),
                    outcome: Some(outcome),
                    rejected,
                    max_n,
                });
            }
            rejected.push(RejectedCandidate { c, outcome });
        }
    }
    Ok(ArrowSearchOutcome {
        found: None,
        outcome: None,
        rejected,
        max_n,
    })
}
