use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Shared work budget for the bounded searches.
///
/// Every search charges nodes against `max_nodes`; exceeding either the node
/// budget or the deadline yields [`Error::ResourceLimit`], never a silent
/// truncation.
#[derive(Debug)]
pub struct Budget {
    max_nodes: u64,
    used: AtomicU64,
    deadline: Option<Instant>,
    /// Upper bound on the number of candidates a single enumeration step may
    /// generate (product of option counts).
    pub max_candidates: u64,
    /// Upper bound on the order of automorphism groups materialized in full.
    pub max_group_order: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(2_000_000_000)
    }
}

impl Budget {
    pub fn new(max_nodes: u64) -> Self {
        Budget {
            max_nodes,
            used: AtomicU64::new(0),
            deadline: None,
            max_candidates: 1 << 24,
            max_group_order: 1 << 20,
        }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.deadline = Some(Instant::now() + limit);
        self
    }

    pub fn with_max_candidates(mut self, cap: u64) -> Self {
        self.max_candidates = cap;
        self
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    /// Charge `n` search nodes.
    pub fn charge(&self, n: u64) -> Result<()> {
        let before = self.used.fetch_add(n, Ordering::Relaxed);
        if before.saturating_add(n) > self.max_nodes {
            return Err(Error::ResourceLimit(format!(
                "node budget of {} exhausted",
                self.max_nodes
            )));
        }
        // Checking the clock on every node is too slow; sample it.
        if let Some(deadline) = self.deadline {
            if before % 1024 == 0 && Instant::now() > deadline {
                return Err(Error::ResourceLimit("time budget exhausted".into()));
            }
        }
        Ok(())
    }

    pub fn check_candidates(&self, what: &str, count: u128) -> Result<()> {
        if count > self.max_candidates as u128 {
            return Err(Error::ResourceLimit(format!(
                "{what}: {count} candidates exceed the cap of {}",
                self.max_candidates
            )));
        }
        Ok(())
    }
}
