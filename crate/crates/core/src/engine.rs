//! The TOAD procedure as an incremental state machine.
//!
//! At each stage `t` the engine:
//!
//! 1. freezes past rejections that fell out of the active window,
//!    `R_old = R_{t-1} \ C_t` (decaying-memory mode uses `R_old = {}`);
//! 2. maintains the statistics `W_i = P_i / A_i` of the active window in
//!    sorted order (`W_i = +inf` for ignored hypotheses with `A_i = 0`);
//! 3. picks the step-up rank
//!    `S_t = max{ j <= |C_t| : W_(j) <= alpha * beta(j + |R_old|) }` and
//!    rejects `R_t = R_old ∪ { i in C_t : W_i <= W_(S_t) }`;
//! 4. commits the weights of every hypothesis whose commit stage is `t`,
//!    handing the policy exactly the masked history it is allowed to read.
//!
//! Rejections can land retroactively on any active hypothesis, but in
//! standard mode a rejection is never reversed. An adaptive [`StopRule`] may
//! end testing early by zeroing all not-yet-committed weights; the run still
//! continues to the declared horizon so the trace stays well defined.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::deadline::DeadlineSchedule;
use crate::error::{Error, Result};
use crate::policy::{ThresholdPolicy, BUDGET_TOLERANCE};
use crate::shape::ShapeFunction;
use crate::stream::HypothesisStream;
use crate::trace::{DecisionTrace, StageDelta};
use crate::MaskedHistory;

/// Which FDR the run is aimed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Control FDR over all rejections ever made. Rejections are permanent
    /// and the weight budget is global (`sum_i A_i <= 1`).
    Standard,
    /// Decaying memory: control FDR over still-active rejections only.
    /// `R_old` is replaced by the empty set, outdated rejections are
    /// forgotten, and the budget is per-window (`sum_{i in C_t} A_i <= 1`),
    /// so weights from expired hypotheses can be recycled.
    Recent,
}

/// Decides, from the stage outcome, whether to stop all future testing.
pub trait StopRule: Send {
    fn should_stop(&mut self, report: &StageReport) -> bool;
}

impl<F: FnMut(&StageReport) -> bool + Send> StopRule for F {
    fn should_stop(&mut self, report: &StageReport) -> bool {
        self(report)
    }
}

/// Stop once a batch accumulates at least `min_rejections` rejections by its
/// deadline. Meant for batch deadline schedules with the same batch size.
#[derive(Debug, Clone)]
pub struct BatchRejectionStop {
    n_batch: usize,
    min_rejections: usize,
    in_current_batch: usize,
}

impl BatchRejectionStop {
    pub fn new(n_batch: usize, min_rejections: usize) -> Self {
        Self { n_batch, min_rejections, in_current_batch: 0 }
    }
}

impl StopRule for BatchRejectionStop {
    fn should_stop(&mut self, report: &StageReport) -> bool {
        self.in_current_batch += report.newly_rejected.len();
        if report.stage.is_multiple_of(self.n_batch) {
            let full = self.in_current_batch >= self.min_rejections;
            self.in_current_batch = 0;
            full
        } else {
            false
        }
    }
}

/// What changed at one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub stage: usize,
    /// The chosen step-up rank `S_t` (0 when nothing cleared the threshold).
    pub step_up_rank: usize,
    /// Newly rejected indices, ascending. Contains `stage` itself for an
    /// immediate rejection; smaller indices are retroactive.
    pub newly_rejected: Vec<usize>,
    /// Rejections withdrawn or forgotten at this stage (decaying memory only).
    pub removed: Vec<usize>,
    /// True when the stop rule fired at this stage.
    pub stopped: bool,
}

impl StageReport {
    /// Whether the stage's own hypothesis was rejected as it arrived.
    pub fn immediate(&self) -> bool {
        self.newly_rejected.binary_search(&self.stage).is_ok()
    }

    /// Rejections of hypotheses from earlier stages.
    pub fn retroactive(&self) -> impl Iterator<Item = usize> + '_ {
        let stage = self.stage;
        self.newly_rejected.iter().copied().filter(move |&i| i < stage)
    }
}

/// Everything a run needs besides the data itself.
pub struct EngineConfig {
    pub alpha: f64,
    pub beta: ShapeFunction,
    pub policy: Box<dyn ThresholdPolicy>,
    pub deadlines: DeadlineSchedule,
    pub mode: Mode,
    pub stop: Option<Box<dyn StopRule>>,
}

impl EngineConfig {
    pub fn new(
        alpha: f64,
        beta: ShapeFunction,
        policy: Box<dyn ThresholdPolicy>,
        deadlines: DeadlineSchedule,
    ) -> Self {
        Self { alpha, beta, policy, deadlines, mode: Mode::Standard, stop: None }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_stop(mut self, stop: Box<dyn StopRule>) -> Self {
        self.stop = Some(stop);
        self
    }
}

/// The TOAD state machine. Feed it one p-value per stage with [`step`](Self::step).
pub struct ToadEngine {
    alpha: f64,
    beta: ShapeFunction,
    policy: Box<dyn ThresholdPolicy>,
    deadlines: DeadlineSchedule,
    mode: Mode,
    stop: Option<Box<dyn StopRule>>,
    horizon: usize,
    stage: usize,
    /// Committed weights, 1-based; `None` until the commit stage passes.
    committed: Vec<Option<f64>>,
    /// `commit_queue[tau]` lists the indices whose weight commits at stage `tau`.
    commit_queue: Vec<Vec<usize>>,
    history: MaskedHistory,
    /// `W_i = P_i / A_i`, 1-based; NaN until observed, +inf when ignored.
    stats: Vec<f64>,
    /// Active candidates as `(W_i, i)`, sorted ascending by statistic then index.
    window: Vec<(f64, usize)>,
    rejected: Vec<bool>,
    first_rejected_at: Vec<Option<usize>>,
    rejection_count: usize,
    budget_used: f64,
    stopped_after: Option<usize>,
    trace: DecisionTrace,
}

impl core::fmt::Debug for ToadEngine {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ToadEngine")
            .field("stage", &self.stage)
            .field("horizon", &self.horizon)
            .field("mode", &self.mode)
            .field("rejection_count", &self.rejection_count)
            .field("stopped_after", &self.stopped_after)
            .finish_non_exhaustive()
    }
}

impl ToadEngine {
    pub fn new(config: EngineConfig, horizon: usize) -> Result<Self> {
        let EngineConfig { alpha, beta, policy, deadlines, mode, stop } = config;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::AlphaOutOfRange { alpha });
        }
        if !deadlines.covers(horizon) {
            return Err(Error::IndexOutsideSchedule {
                index: horizon,
                len: deadlines.len_limit().unwrap_or(0),
            });
        }

        let mut commit_queue: Vec<Vec<usize>> = alloc::vec![Vec::new(); horizon];
        for index in 1..=horizon {
            let tau = policy.commit_stage(index);
            if tau >= index {
                return Err(Error::CommitStageOutOfRange { index, commit_stage: tau });
            }
            commit_queue[tau].push(index);
        }

        let mut engine = Self {
            alpha,
            beta,
            policy,
            deadlines,
            mode,
            stop,
            horizon,
            stage: 0,
            committed: alloc::vec![None; horizon + 1],
            commit_queue,
            history: MaskedHistory::new(),
            stats: alloc::vec![f64::NAN; horizon + 1],
            window: Vec::new(),
            rejected: alloc::vec![false; horizon + 1],
            first_rejected_at: alloc::vec![None; horizon + 1],
            rejection_count: 0,
            budget_used: 0.0,
            stopped_after: None,
            trace: DecisionTrace::new(),
        };
        engine.commit_due_at(0)?;
        Ok(engine)
    }

    /// Observe the next p-value and update every active decision.
    pub fn step(&mut self, p: f64) -> Result<StageReport> {
        if self.stage >= self.horizon {
            return Err(Error::PastHorizon { stage: self.stage + 1, horizon: self.horizon });
        }
        let t = self.stage + 1;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPValue { index: t, value: p });
        }
        self.stage = t;

        let weight = self.committed[t].expect("weight committed by stage tau_t < t");
        let stat = if weight > 0.0 {
            self.history.push_observed(p);
            p / weight
        } else {
            self.history.push_ignored();
            f64::INFINITY
        };
        self.stats[t] = stat;

        // Drop candidates whose deadline passed; with decaying memory their
        // rejections are forgotten at the same moment.
        let mut removed = Vec::new();
        let forget = self.mode == Mode::Recent;
        let deadlines = &self.deadlines;
        let rejected = &mut self.rejected;
        let mut forgotten = 0usize;
        self.window.retain(|&(_, i)| {
            let live = deadlines.deadline(i).includes(t);
            if !live && forget && rejected[i] {
                rejected[i] = false;
                forgotten += 1;
                removed.push(i);
            }
            live
        });
        self.rejection_count -= forgotten;

        let pos = self
            .window
            .partition_point(|&(w, i)| w.total_cmp(&stat).then(i.cmp(&t)).is_lt());
        self.window.insert(pos, (stat, t));

        if self.mode == Mode::Recent {
            let sum: f64 =
                self.window.iter().map(|&(_, i)| self.committed[i].unwrap_or(0.0)).sum();
            if sum > 1.0 + BUDGET_TOLERANCE {
                return Err(Error::WindowBudgetExceeded { stage: t, sum });
            }
        }

        let active_rejected = self.window.iter().filter(|&&(_, i)| self.rejected[i]).count();
        let frozen = match self.mode {
            Mode::Standard => self.rejection_count - active_rejected,
            Mode::Recent => 0,
        };

        // Step-up scan from the top; the first qualifying rank is S_t.
        let mut rank = 0;
        for j in (1..=self.window.len()).rev() {
            if self.window[j - 1].0 <= self.alpha * self.beta.at_rank(j + frozen) {
                rank = j;
                break;
            }
        }

        // Reject everything at or below the threshold statistic. Ties cannot
        // extend past S_t (they would have produced a larger rank), but the
        // set is defined by the threshold, so scan by value.
        let mut cut = rank;
        if rank > 0 {
            let threshold = self.window[rank - 1].0;
            while cut < self.window.len() && self.window[cut].0 <= threshold {
                cut += 1;
            }
        }

        let mut added = Vec::new();
        for &(_, i) in &self.window[..cut] {
            if !self.rejected[i] {
                self.rejected[i] = true;
                self.first_rejected_at[i].get_or_insert(t);
                self.rejection_count += 1;
                added.push(i);
            }
        }
        match self.mode {
            Mode::Standard => {
                debug_assert!(
                    self.window[cut..].iter().all(|&(_, i)| !self.rejected[i]),
                    "a standard-mode rejection fell back below the threshold"
                );
            }
            Mode::Recent => {
                // Active rejections are recomputed each stage; drop stragglers.
                for &(_, i) in &self.window[cut..] {
                    if self.rejected[i] {
                        self.rejected[i] = false;
                        self.rejection_count -= 1;
                        removed.push(i);
                    }
                }
            }
        }
        added.sort_unstable();
        removed.sort_unstable();

        let mut report = StageReport {
            stage: t,
            step_up_rank: rank,
            newly_rejected: added,
            removed,
            stopped: false,
        };

        // The stop decision is taken from this stage's results, before the
        // weights due at this stage commit, so those commits are zeroable.
        if self.stopped_after.is_none() {
            if let Some(rule) = self.stop.as_mut() {
                if rule.should_stop(&report) {
                    for i in (t + 1)..=self.horizon {
                        if matches!(self.committed[i], Some(w) if w > 0.0) {
                            return Err(Error::StopAfterCommitment { index: i });
                        }
                    }
                    self.stopped_after = Some(t);
                    report.stopped = true;
                }
            }
        }

        self.commit_due_at(t)?;

        self.trace.push_stage(StageDelta {
            added: report.newly_rejected.clone(),
            removed: report.removed.clone(),
            step_up_rank: rank,
        });
        Ok(report)
    }

    /// Commits every weight due at stage `tau`.
    fn commit_due_at(&mut self, tau: usize) -> Result<()> {
        if tau >= self.commit_queue.len() {
            return Ok(());
        }
        let due = core::mem::take(&mut self.commit_queue[tau]);
        for index in due {
            let weight = if self.stopped_after.is_some() {
                0.0
            } else {
                self.policy.weight(index, self.history.prefix(tau))
            };
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidWeight { index, weight });
            }
            if self.mode == Mode::Standard {
                self.budget_used += weight;
                if self.budget_used > 1.0 + BUDGET_TOLERANCE {
                    return Err(Error::BudgetExceeded { sum: self.budget_used });
                }
            }
            self.committed[index] = Some(weight);
        }
        Ok(())
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn is_rejected(&self, index: usize) -> bool {
        self.rejected[index]
    }

    pub fn rejection_count(&self) -> usize {
        self.rejection_count
    }

    /// Committed weight `A_index`, if its commit stage has passed.
    pub fn committed_weight(&self, index: usize) -> Option<f64> {
        self.committed[index]
    }

    /// Statistic `W_index = P_index / A_index` once stage `index` has run.
    pub fn statistic(&self, index: usize) -> Option<f64> {
        let w = self.stats.get(index).copied()?;
        (!w.is_nan()).then_some(w)
    }

    /// First stage at which `index` was rejected.
    pub fn first_rejected_at(&self, index: usize) -> Option<usize> {
        self.first_rejected_at[index]
    }

    /// The stage after which all future weights were zeroed, if any.
    pub fn stopped_after(&self) -> Option<usize> {
        self.stopped_after
    }

    pub fn masked_history(&self) -> &MaskedHistory {
        &self.history
    }

    pub fn trace(&self) -> &DecisionTrace {
        &self.trace
    }

    pub fn into_trace(self) -> DecisionTrace {
        self.trace
    }
}

/// Runs the whole stream through a fresh engine.
pub fn run(config: EngineConfig, stream: &HypothesisStream) -> Result<DecisionTrace> {
    let mut engine = ToadEngine::new(config, stream.len())?;
    for t in 1..=stream.len() {
        engine.step(stream.p_value(t))?;
    }
    Ok(engine.into_trace())
}
