//! Significance-budget policies and the masked p-value history they may read.
//!
//! A policy assigns each hypothesis `i` a nonnegative weight `A_i`, committed
//! by its commit stage `tau_i <= i - 1` as a deterministic function of the
//! masked p-values observed up to `tau_i`. Over a whole run the weights must
//! satisfy the budget `sum_i A_i <= 1` (or, with decaying memory, a per-window
//! budget enforced by the engine). A hypothesis with `A_i = 0` is *ignored*:
//! it can never be rejected and its entry in the masked history is the
//! sentinel value -1, so that later adaptive choices cannot depend on it.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::DeadlineSchedule;

/// Sentinel stored in a [`MaskedHistory`] for ignored hypotheses.
pub const IGNORED_ENTRY: f64 = -1.0;

/// Slack allowed on weight-budget sums, absorbing floating-point accumulation.
pub const BUDGET_TOLERANCE: f64 = 1e-12;

/// Per-stage record of observed p-values with ignored stages masked to -1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaskedHistory {
    entries: Vec<f64>,
}

impl MaskedHistory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a history from raw entries, each in `[0, 1]` or exactly -1.
    pub fn from_entries(entries: Vec<f64>) -> Result<Self> {
        for (pos, &e) in entries.iter().enumerate() {
            if !(0.0..=1.0).contains(&e) && e != IGNORED_ENTRY {
                return Err(Error::InvalidMaskedEntry { index: pos + 1, value: e });
            }
        }
        Ok(Self { entries })
    }

    pub fn push_observed(&mut self, p: f64) {
        debug_assert!((0.0..=1.0).contains(&p));
        self.entries.push(p);
    }

    pub fn push_ignored(&mut self) {
        self.entries.push(IGNORED_ENTRY);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry for stage `index` (1-based): the p-value, or -1 if ignored.
    pub fn entry(&self, index: usize) -> f64 {
        self.entries[index - 1]
    }

    /// The p-value at `index`, unless that stage was ignored.
    pub fn observed(&self, index: usize) -> Option<f64> {
        let e = self.entry(index);
        (e != IGNORED_ENTRY).then_some(e)
    }

    pub fn is_ignored(&self, index: usize) -> bool {
        self.entry(index) == IGNORED_ENTRY
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// First `len` entries; the view a policy committed at stage `len` may read.
    pub fn prefix(&self, len: usize) -> &[f64] {
        &self.entries[..len.min(self.entries.len())]
    }
}

/// A rule assigning significance weights to hypotheses.
///
/// `weight(i, observed)` must be a deterministic function of at most the
/// first `commit_stage(i)` entries of the masked history. The engine enforces
/// this by only ever passing that prefix; [`validate_policy`] probes for
/// rules that would read further if handed a longer slice.
pub trait ThresholdPolicy: Send + Sync {
    /// Stage by which the weight for `index` is fixed; in `0..index`.
    fn commit_stage(&self, index: usize) -> usize;

    /// Weight `A_index`, given the masked history prefix it may depend on.
    fn weight(&self, index: usize, observed: &[f64]) -> f64;
}

/// When a constant-valued policy commits its weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommitTiming {
    /// Everything fixed before the run (`tau_i = 0`).
    Upfront,
    /// Each weight fixed at the last admissible stage (`tau_i = i - 1`),
    /// which leaves room for adaptive stopping.
    JustInTime,
}

/// The same weight for every hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantPolicy {
    weight: f64,
    timing: CommitTiming,
}

impl ConstantPolicy {
    pub fn new(weight: f64) -> Result<Self> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeight { index: 1, weight });
        }
        Ok(Self { weight, timing: CommitTiming::Upfront })
    }

    /// `A_i = 1 / horizon`, the budget spread evenly over the whole run.
    pub fn spread(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::ZeroHorizon);
        }
        Self::new(1.0 / horizon as f64)
    }

    pub fn with_timing(mut self, timing: CommitTiming) -> Self {
        self.timing = timing;
        self
    }
}

impl ThresholdPolicy for ConstantPolicy {
    fn commit_stage(&self, index: usize) -> usize {
        match self.timing {
            CommitTiming::Upfront => 0,
            CommitTiming::JustInTime => index - 1,
        }
    }

    fn weight(&self, _index: usize, _observed: &[f64]) -> f64 {
        self.weight
    }
}

/// A preset weight sequence (`tau_i = 0`); indices past the end get weight 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedWeights {
    weights: Vec<f64>,
}

impl FixedWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        for (pos, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight { index: pos + 1, weight: w });
            }
        }
        Ok(Self { weights })
    }
}

impl ThresholdPolicy for FixedWeights {
    fn commit_stage(&self, _index: usize) -> usize {
        0
    }

    fn weight(&self, index: usize, _observed: &[f64]) -> f64 {
        self.weights.get(index - 1).copied().unwrap_or(0.0)
    }
}

/// A policy truncated at a stopping stage: identical up to the stage, zero after.
pub struct StoppedPolicy {
    inner: Box<dyn ThresholdPolicy>,
    last_stage: usize,
}

impl core::fmt::Debug for StoppedPolicy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("StoppedPolicy").field("last_stage", &self.last_stage).finish()
    }
}

impl ThresholdPolicy for StoppedPolicy {
    fn commit_stage(&self, index: usize) -> usize {
        self.inner.commit_stage(index)
    }

    fn weight(&self, index: usize, observed: &[f64]) -> f64 {
        if index > self.last_stage {
            0.0
        } else {
            self.inner.weight(index, observed)
        }
    }
}

/// Stops a policy after `last_stage`, as decided at the end of that stage.
///
/// Zeroing is only possible for weights not yet committed to a positive
/// value. Weights with `tau_i = last_stage` commit at the same stage the stop
/// decision is taken and so remain zeroable; weights for later hypotheses
/// with `tau_i < last_stage` are already fixed, and if any of them is
/// positive the stop is rejected, since specifying a future test commits the
/// analyst to completing it. `history` is the masked record available when
/// the decision is made (at least `last_stage` entries, unless the horizon is
/// shorter).
pub fn stop_at(
    policy: Box<dyn ThresholdPolicy>,
    last_stage: usize,
    history: &MaskedHistory,
    horizon: usize,
) -> Result<StoppedPolicy> {
    for index in (last_stage + 1)..=horizon {
        let tau = policy.commit_stage(index);
        if tau < last_stage && policy.weight(index, history.prefix(tau)) > 0.0 {
            return Err(Error::StopAfterCommitment { index });
        }
    }
    Ok(StoppedPolicy { inner: policy, last_stage })
}

/// One constraint failure found while validating a policy.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyViolation {
    /// `A_index` came out negative, infinite, or NaN.
    InvalidWeight { index: usize, weight: f64 },
    /// The realized weights sum past the unit budget.
    BudgetExceeded { sum: f64 },
    /// The rule for `index` read masked entries past its commit stage.
    Lookahead { index: usize },
    /// `tau_index` is not in `0..index`.
    CommitStageOutOfRange { index: usize, commit_stage: usize },
    /// Active-window weights sum past 1 at `stage` (decaying-memory budget).
    WindowBudgetExceeded { stage: usize, sum: f64 },
}

/// Outcome of a dry-run policy validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub horizon: usize,
    /// Realized `sum_i A_i` on the dry-run history.
    pub budget: f64,
    pub violations: Vec<PolicyViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A neutral masked history (every entry observed as 0.5) for dry runs.
pub fn dry_run_history(horizon: usize) -> MaskedHistory {
    let mut h = MaskedHistory::new();
    for _ in 0..horizon {
        h.push_observed(0.5);
    }
    h
}

/// Dry-runs a policy over a finite horizon against a given masked history.
///
/// Checks that every weight is finite and nonnegative, that the realized
/// budget satisfies `sum A_i <= 1` up to [`BUDGET_TOLERANCE`], that commit
/// stages lie in `0..index`, and that no rule reads history entries past its
/// commit stage (probed by perturbing all later entries and requiring the
/// weight to be unchanged).
pub fn validate_policy(
    policy: &dyn ThresholdPolicy,
    horizon: usize,
    history: &MaskedHistory,
) -> ValidationReport {
    let mut violations = Vec::new();
    let mut budget = 0.0;

    let perturbed = [perturb_history(history, 0.3), perturb_history(history, 0.7)];

    for index in 1..=horizon {
        let tau = policy.commit_stage(index);
        if tau >= index {
            violations.push(PolicyViolation::CommitStageOutOfRange { index, commit_stage: tau });
            continue;
        }
        let w = policy.weight(index, history.prefix(tau));
        if !w.is_finite() || w < 0.0 {
            violations.push(PolicyViolation::InvalidWeight { index, weight: w });
            continue;
        }
        budget += w;

        // Lookahead probe: hand the rule histories that differ only past tau.
        for alt in &perturbed {
            let mut probe = history.prefix(tau).to_vec();
            probe.extend_from_slice(&alt[tau..alt.len()]);
            if policy.weight(index, &probe) != w {
                violations.push(PolicyViolation::Lookahead { index });
                break;
            }
        }
    }

    if budget > 1.0 + BUDGET_TOLERANCE {
        violations.push(PolicyViolation::BudgetExceeded { sum: budget });
    }

    ValidationReport { horizon, budget, violations }
}

/// Checks the decaying-memory budget `sum_{i in C_t} A_i <= 1` for every stage.
pub fn validate_recycled_budget(
    policy: &dyn ThresholdPolicy,
    horizon: usize,
    deadlines: &DeadlineSchedule,
    history: &MaskedHistory,
) -> Vec<PolicyViolation> {
    let mut violations = Vec::new();
    let weights: Vec<f64> = (1..=horizon)
        .map(|i| policy.weight(i, history.prefix(policy.commit_stage(i))))
        .collect();
    for stage in 1..=horizon {
        let sum: f64 = deadlines.active_set(stage).iter().map(|&i| weights[i - 1]).sum();
        if sum > 1.0 + BUDGET_TOLERANCE {
            violations.push(PolicyViolation::WindowBudgetExceeded { stage, sum });
        }
    }
    violations
}

/// Moves every entry of a history to a different valid value.
fn perturb_history(history: &MaskedHistory, shift: f64) -> Vec<f64> {
    history
        .entries()
        .iter()
        .map(|&e| {
            if e == IGNORED_ENTRY {
                shift
            } else {
                // fract(e + shift) != e for any non-integer shift.
                let moved = e + shift;
                if moved >= 1.0 {
                    moved - 1.0
                } else {
                    moved
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masked_history_round_trips_observed_entries() {
        let mut h = MaskedHistory::new();
        h.push_observed(0.25);
        h.push_ignored();
        h.push_observed(0.75);
        assert_eq!(h.observed(1), Some(0.25));
        assert_eq!(h.observed(2), None);
        assert!(h.is_ignored(2));
        assert_eq!(h.entry(2), IGNORED_ENTRY);
        assert_eq!(h.observed(3), Some(0.75));
        assert_eq!(h.prefix(2), &[0.25, IGNORED_ENTRY]);
    }

    #[test]
    fn masked_history_rejects_bad_entries() {
        assert!(MaskedHistory::from_entries(vec![0.5, -1.0, 1.0]).is_ok());
        assert_eq!(
            MaskedHistory::from_entries(vec![0.5, -0.5]),
            Err(Error::InvalidMaskedEntry { index: 2, value: -0.5 })
        );
    }

    #[test]
    fn spread_policy_is_valid_at_the_paper_horizon() {
        let policy = ConstantPolicy::spread(3000).unwrap();
        let report = validate_policy(&policy, 3000, &dry_run_history(3000));
        assert!(report.is_valid(), "violations: {:?}", report.violations);
        assert!((report.budget - 1.0).abs() <= BUDGET_TOLERANCE);
    }

    #[test]
    fn oversize_first_weight_fails_the_budget() {
        let policy = ConstantPolicy::new(1.5).unwrap();
        let report = validate_policy(&policy, 1, &dry_run_history(1));
        assert_eq!(report.violations, vec![PolicyViolation::BudgetExceeded { sum: 1.5 }]);
    }

    #[test]
    fn lookahead_past_the_commit_stage_is_detected() {
        // tau_i = 1 for i > 1, but the rule for index 3 peeks at entry 2.
        struct Peeking;
        impl ThresholdPolicy for Peeking {
            fn commit_stage(&self, index: usize) -> usize {
                (index - 1).min(1)
            }
            fn weight(&self, index: usize, observed: &[f64]) -> f64 {
                if index == 3 {
                    0.1 * (1.0 + observed.get(1).copied().unwrap_or(0.0))
                } else {
                    0.1
                }
            }
        }
        let report = validate_policy(&Peeking, 4, &dry_run_history(4));
        assert!(report.violations.contains(&PolicyViolation::Lookahead { index: 3 }));
    }

    #[test]
    fn stopping_a_just_in_time_policy_is_permitted() {
        let policy = ConstantPolicy::spread(10).unwrap().with_timing(CommitTiming::JustInTime);
        let history = dry_run_history(4);
        let stopped = stop_at(Box::new(policy), 4, &history, 10).unwrap();
        assert_eq!(stopped.weight(4, &[]), 0.1);
        assert_eq!(stopped.weight(5, &[]), 0.0);
        let report = validate_policy(&stopped, 10, &dry_run_history(10));
        assert!(report.is_valid());
        assert!((report.budget - 0.4).abs() < 1e-15);
    }

    #[test]
    fn stopping_an_upfront_policy_is_rejected() {
        let policy = ConstantPolicy::spread(10).unwrap();
        let history = dry_run_history(4);
        let err = stop_at(Box::new(policy), 4, &history, 10).unwrap_err();
        assert_eq!(err, Error::StopAfterCommitment { index: 5 });
    }

    #[test]
    fn stopping_at_the_horizon_changes_nothing() {
        let policy = ConstantPolicy::spread(10).unwrap();
        let stopped = stop_at(Box::new(policy), 10, &dry_run_history(10), 10).unwrap();
        for i in 1..=10 {
            assert_eq!(stopped.weight(i, &[]), 0.1);
        }
    }

    #[test]
    fn plan_ahead_commitments_block_stopping_when_positive() {
        // tau_i = max(0, i - 101): weights are fixed 101 stages in advance.
        struct PlanAhead;
        impl ThresholdPolicy for PlanAhead {
            fn commit_stage(&self, index: usize) -> usize {
                index.saturating_sub(101)
            }
            fn weight(&self, _index: usize, _observed: &[f64]) -> f64 {
                1.0 / 3000.0
            }
        }
        let history = dry_run_history(5);
        let err = stop_at(Box::new(PlanAhead), 5, &history, 3000).unwrap_err();
        assert_eq!(err, Error::StopAfterCommitment { index: 6 });
    }

    #[test]
    fn recycled_budget_flags_overweight_windows() {
        let deadlines = DeadlineSchedule::batch(3).unwrap();
        let heavy = ConstantPolicy::new(0.5).unwrap();
        let violations = validate_recycled_budget(&heavy, 6, &deadlines, &dry_run_history(6));
        assert!(violations
            .iter()
            .any(|v| matches!(v, PolicyViolation::WindowBudgetExceeded { stage: 3, .. })));
        let ok = ConstantPolicy::new(1.0 / 3.0).unwrap();
        assert!(validate_recycled_budget(&ok, 6, &deadlines, &dry_run_history(6)).is_empty());
    }
}
