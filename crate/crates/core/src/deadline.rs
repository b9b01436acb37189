//! Deadline schedules and active candidate sets.
//!
//! Hypothesis `i` (1-based) enters at stage `i` and its reject/accept decision
//! may be revised until its deadline `d_i >= i` passes. The set of hypotheses
//! whose decisions are still open at stage `t` is the active set
//! `C_t = {i <= t : d_i >= t}`; it always contains `t` itself.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Last stage at which the decision for one hypothesis may still change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Deadline {
    /// Fixed final stage.
    At(usize),
    /// The decision stays open forever.
    Never,
}

impl Deadline {
    /// True when the hypothesis is still revisable at `stage`.
    pub fn includes(self, stage: usize) -> bool {
        match self {
            Deadline::At(d) => d >= stage,
            Deadline::Never => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    /// `d_i` is the smallest multiple of the batch size that is >= i.
    Batch(usize),
    /// Every deadline is open (`d_i` infinite).
    Open,
    /// One preset deadline per index; finite and open deadlines may mix.
    Explicit(Vec<Deadline>),
}

/// Preset per-hypothesis deadlines, fixed before the run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeadlineSchedule {
    kind: Kind,
}

impl DeadlineSchedule {
    /// Batch schedule: `d_i = min{ k*n_batch : i <= k*n_batch }`.
    pub fn batch(n_batch: usize) -> Result<Self> {
        if n_batch == 0 {
            return Err(Error::ZeroBatchSize);
        }
        Ok(Self { kind: Kind::Batch(n_batch) })
    }

    /// Fully online schedule `d_i = i`: decisions are final immediately.
    pub fn immediate() -> Self {
        Self { kind: Kind::Batch(1) }
    }

    /// All decisions stay revisable indefinitely (`C_t = {1, ..., t}`).
    pub fn open() -> Self {
        Self { kind: Kind::Open }
    }

    /// Explicit deadlines, one per index starting at 1. Enforces `d_i >= i`.
    pub fn from_deadlines(deadlines: Vec<Deadline>) -> Result<Self> {
        for (pos, d) in deadlines.iter().enumerate() {
            let index = pos + 1;
            if let Deadline::At(stage) = d {
                if *stage < index {
                    return Err(Error::DeadlineBeforeIndex { index, deadline: *stage });
                }
            }
        }
        Ok(Self { kind: Kind::Explicit(deadlines) })
    }

    /// Length limit of an explicit schedule; rule-based schedules are unbounded.
    pub fn len_limit(&self) -> Option<usize> {
        match &self.kind {
            Kind::Explicit(d) => Some(d.len()),
            _ => None,
        }
    }

    /// True when the schedule defines a deadline for every index up to `horizon`.
    pub fn covers(&self, horizon: usize) -> bool {
        self.len_limit().is_none_or(|len| len >= horizon)
    }

    /// Deadline of hypothesis `index` (1-based).
    ///
    /// Panics if an explicit schedule does not cover `index`; callers are
    /// expected to check [`covers`](Self::covers) against their horizon first.
    pub fn deadline(&self, index: usize) -> Deadline {
        debug_assert!(index >= 1, "indices are 1-based");
        match &self.kind {
            Kind::Batch(n) => Deadline::At(index.div_ceil(*n) * n),
            Kind::Open => Deadline::Never,
            Kind::Explicit(d) => d[index - 1],
        }
    }

    /// True when `index` is active at `stage`: it has entered and not expired.
    pub fn is_active(&self, index: usize, stage: usize) -> bool {
        index <= stage && self.deadline(index).includes(stage)
    }

    /// Active set `C_t = {i <= t : d_i >= t}`, ascending. Never empty for t >= 1.
    pub fn active_set(&self, stage: usize) -> Vec<usize> {
        debug_assert!(stage >= 1, "stages are 1-based");
        match &self.kind {
            Kind::Open => (1..=stage).collect(),
            Kind::Batch(n) => {
                // Contiguous tail of the current batch.
                let start = (stage - 1) / n * n + 1;
                (start..=stage).collect()
            }
            Kind::Explicit(_) => (1..=stage).filter(|&i| self.is_active(i, stage)).collect(),
        }
    }
}
