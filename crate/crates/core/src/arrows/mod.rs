//! Arrow relations with certificates: classical, up to ε, definable,
//! stable, Roelcke witnesses, proximal and convex.

mod classical;
mod coloring;
mod convex;
mod definable;
mod game;
mod proximal;
mod search;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{Embedding, Structure};

pub use classical::{check_bad_coloring, classical_arrow, find_bad_coloring_plain, ClassicalOutcome};
pub use coloring::{Coloring, Values};
pub use convex::{convex_arrow, verify_convex, ConvexCombination, ConvexOutcome, StrategyEntry};
pub use definable::{
    definable_arrow, roelcke_valid, roelcke_witness, stable_arrow, verify_definable, DefinableChoice,
    DefinableOutcome, RoelckeOutcome,
};
pub use game::{solve_matrix_game, GameSolution};
pub use proximal::{proximal_arrow, proximal_check, verify_proximal, ProximalEntry, ProximalReport};
pub use search::{arrow_search, ArrowSearchOutcome, RejectedCandidate};

pub(crate) use classical::domain_permutations;
pub(crate) use coloring::CopySystem;

/// Absolute tolerance for real comparisons.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    /// `A` does not embed in `B`; the arrow holds vacuously.
    DegenerateHolds,
    /// A hypothesis of the arrow could not be established.
    PreconditionFailed,
}

impl Verdict {
    pub fn holds(self) -> bool {
        matches!(self, Verdict::Holds | Verdict::DegenerateHolds)
    }
}

/// Largest minus smallest value on `indices`; zero when empty.
pub(crate) fn oscillation(values: impl Iterator<Item = f64>) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        0.0
    } else {
        hi - lo
    }
}

/// The first `b` in `embeddings(B, U)` on whose copy the real coloring `chi`
/// of `embeddings(A, U)` oscillates strictly less than `epsilon`.
pub fn epsilon_constant_witness(
    u: &Structure,
    a: &Structure,
    chi: &Coloring,
    b: &Structure,
    epsilon: f64,
) -> Result<Option<Embedding>> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    chi.check_domain(a, u)?;
    let sys = CopySystem::new(a, b, u)?;
    Ok(sys
        .copies
        .iter()
        .zip(&sys.sets)
        .find(|(_, set)| oscillation(set.iter().map(|&i| chi.value(i))) < epsilon - TOLERANCE)
        .map(|(copy, _)| copy.clone()))
}

/// First `b` in `embeddings(B, U)` on whose copy `chi` takes one value.
pub(crate) fn constant_copy(u: &Structure, a: &Structure, b: &Structure, chi: &Coloring) -> Result<Option<Embedding>> {
    let sys = CopySystem::new(a, b, u)?;
    Ok(sys
        .copies
        .iter()
        .zip(&sys.sets)
        .find(|(_, set)| set.iter().all(|&i| chi.value(i) == chi.value(set[0])))
        .map(|(copy, _)| copy.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::embeddings;

    #[test]
    fn epsilon_examples() {
        let u = Structure::chain(4);
        let pt = Structure::chain(1);
        let domain = embeddings(&pt, &u).unwrap();
        let chi = Coloring::reals(domain.clone(), vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]).unwrap();
        let w = epsilon_constant_witness(&u, &pt, &chi, &Structure::chain(2), 0.4).unwrap();
        assert_eq!(w, Some(Embedding(vec![0, 1])));
        assert_eq!(
            epsilon_constant_witness(&u, &pt, &chi, &Structure::chain(2), 0.3).unwrap(),
            None
        );
        let constant = Coloring::reals(domain, vec![0.5; 4]).unwrap();
        let w = epsilon_constant_witness(&u, &pt, &constant, &Structure::chain(3), 0.01).unwrap();
        assert_eq!(w, Some(Embedding(vec![0, 1, 2])));
        assert!(epsilon_constant_witness(&u, &pt, &constant, &Structure::chain(3), 0.0).is_err());
    }
}
