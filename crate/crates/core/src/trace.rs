//! Per-stage decision traces shared by every procedure.
//!
//! Traces store stage-by-stage set *deltas* rather than full rejection sets,
//! so a long run with few decisions stays small. `rejection_set_at` and the
//! stage visitor replay the deltas.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::deadline::DeadlineSchedule;
use crate::error::{Error, Result};

/// Changes to the rejection set at one stage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StageDelta {
    /// Indices newly rejected at this stage, ascending.
    pub added: Vec<usize>,
    /// Indices leaving the reported rejection set (decaying-memory runs only).
    pub removed: Vec<usize>,
    /// The step-up rank `S_t` chosen at this stage (0 for procedures without one).
    pub step_up_rank: usize,
}

/// The evolving rejection sets `R_1, R_2, ...` of one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecisionTrace {
    deltas: Vec<StageDelta>,
}

impl DecisionTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// A trace of `stages` empty stages with all rejections at the final one;
    /// how offline procedures such as BH are represented.
    pub fn single_final_stage(stages: usize, rejected: Vec<usize>) -> Self {
        let mut trace = Self::new();
        for _ in 1..stages {
            trace.push_stage(StageDelta::default());
        }
        if stages > 0 {
            trace.push_stage(StageDelta { added: rejected, removed: Vec::new(), step_up_rank: 0 });
        }
        trace
    }

    pub fn push_stage(&mut self, delta: StageDelta) {
        self.deltas.push(delta);
    }

    /// Number of recorded stages.
    pub fn stages(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn delta(&self, stage: usize) -> &StageDelta {
        &self.deltas[stage - 1]
    }

    /// Calls `visit(stage, rejection_set)` for each stage in order.
    pub fn for_each_stage(&self, mut visit: impl FnMut(usize, &BTreeSet<usize>)) {
        let mut current = BTreeSet::new();
        for (pos, delta) in self.deltas.iter().enumerate() {
            for &i in &delta.added {
                current.insert(i);
            }
            for &i in &delta.removed {
                current.remove(&i);
            }
            visit(pos + 1, &current);
        }
    }

    /// The rejection set after `stage` stages.
    pub fn rejection_set_at(&self, stage: usize) -> Result<BTreeSet<usize>> {
        if stage == 0 || stage > self.deltas.len() {
            return Err(Error::StageOutsideTrace { stage, stages: self.deltas.len() });
        }
        let mut current = BTreeSet::new();
        for delta in &self.deltas[..stage] {
            for &i in &delta.added {
                current.insert(i);
            }
            for &i in &delta.removed {
                current.remove(&i);
            }
        }
        Ok(current)
    }

    /// The rejection set at the final recorded stage (empty for empty traces).
    pub fn final_rejections(&self) -> BTreeSet<usize> {
        match self.stages() {
            0 => BTreeSet::new(),
            n => self.rejection_set_at(n).expect("stage within trace"),
        }
    }

    /// First stage at which `index` was rejected, if ever.
    pub fn rejected_at(&self, index: usize) -> Option<usize> {
        self.deltas
            .iter()
            .position(|d| d.added.contains(&index))
            .map(|pos| pos + 1)
    }

    /// Checks the no-late-update law `R_t \ C_t = R_{t-1} \ C_t`: every
    /// change at stage `t` must involve an index still active at `t`.
    pub fn check_no_late_updates(&self, deadlines: &DeadlineSchedule) -> Result<()> {
        for (pos, delta) in self.deltas.iter().enumerate() {
            let stage = pos + 1;
            for &index in delta.added.iter().chain(delta.removed.iter()) {
                if !deadlines.is_active(index, stage) {
                    return Err(Error::LateUpdate { stage, index });
                }
            }
        }
        Ok(())
    }

    /// Checks monotonicity `R_t ⊆ R_{t+1}`: no rejection is ever withdrawn.
    pub fn check_monotone(&self) -> Result<()> {
        for (pos, delta) in self.deltas.iter().enumerate() {
            if let Some(&index) = delta.removed.first() {
                return Err(Error::RejectionReversed { stage: pos + 1, index });
            }
        }
        Ok(())
    }
}
