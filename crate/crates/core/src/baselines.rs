//! Comparator procedures: LOND, reshaped LOND, classical BH, Naive-BH, and
//! the batchwise BH variants of Zrnic, Jiang, Ramdas & Jordan (2020).
//!
//! Every baseline emits a [`DecisionTrace`], so the metrics layer does not
//! care which procedure produced a run. Offline BH is represented as a trace
//! whose only nonempty stage is the final one.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::policy::BUDGET_TOLERANCE;
use crate::shape::ShapeFunction;
use crate::trace::{DecisionTrace, StageDelta};

/// LOND: reject `H_t` iff `P_t <= (|R_{t-1}| + 1) * a_t * alpha`.
/// Rejections are permanent. A stage with `a_t = 0` is an ignored
/// hypothesis and is never rejected, even at `P_t = 0`.
pub fn lond(p: &[f64], weights: &[f64], alpha: f64) -> Result<DecisionTrace> {
    validate_p(p)?;
    validate_alpha(alpha)?;
    validate_weight_sequence(weights, p.len())?;

    let mut trace = DecisionTrace::new();
    let mut rejections = 0usize;
    for (pos, (&p_t, &a_t)) in p.iter().zip(weights).enumerate() {
        let threshold = (rejections + 1) as f64 * a_t * alpha;
        let mut delta = StageDelta::default();
        if a_t > 0.0 && p_t <= threshold {
            rejections += 1;
            delta.added.push(pos + 1);
        }
        trace.push_stage(delta);
    }
    Ok(trace)
}

/// Reshaped LOND: reject `H_t` iff `P_t <= beta_t(|R_{t-1}| v 1) * a_t * alpha`.
///
/// Note the argument `|R_{t-1}| v 1`, which differs from the `|R_{t-1}| + 1`
/// of the plain rule; with identity shapes the reshaped rule is therefore the
/// (weakly) more conservative of the two.
pub fn lond_reshaped(
    p: &[f64],
    weights: &[f64],
    alpha: f64,
    shapes: &[ShapeFunction],
) -> Result<DecisionTrace> {
    validate_p(p)?;
    validate_alpha(alpha)?;
    validate_weight_sequence(weights, p.len())?;
    if shapes.len() != p.len() {
        return Err(Error::LengthMismatch { expected: p.len(), actual: shapes.len() });
    }

    let mut trace = DecisionTrace::new();
    let mut rejections = 0usize;
    for (pos, (&p_t, &a_t)) in p.iter().zip(weights).enumerate() {
        let threshold = shapes[pos].at_rank(rejections.max(1)) * a_t * alpha;
        let mut delta = StageDelta::default();
        if a_t > 0.0 && p_t <= threshold {
            rejections += 1;
            delta.added.push(pos + 1);
        }
        trace.push_stage(delta);
    }
    Ok(trace)
}

/// Classical Benjamini-Hochberg step-up at level `alpha`.
///
/// Returns the rejected indices (1-based, ascending): the `k` smallest
/// p-values where `k = max{ j : p_(j) <= alpha * j / n }`.
pub fn bh(p: &[f64], alpha: f64) -> Result<Vec<usize>> {
    validate_p(p)?;
    validate_alpha(alpha)?;
    let mut rejected: Vec<usize> = step_up(p, alpha).iter().map(|&i| i + 1).collect();
    rejected.sort_unstable();
    Ok(rejected)
}

/// Step-up over raw positions at an arbitrary nonnegative level (levels above
/// 1 arise in the batch procedures when earlier discoveries are credited).
fn step_up(p: &[f64], level: f64) -> Vec<usize> {
    let n = p.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut count = 0;
    for j in (1..=n).rev() {
        if p[order[j - 1]] <= level * j as f64 / n as f64 {
            count = j;
            break;
        }
    }
    order.truncate(count);
    order
}

/// Contiguous batches partitioning the indices `1..=t_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchLayout {
    /// Inclusive `(start, end)` bounds, 1-based.
    bounds: Vec<(usize, usize)>,
}

impl BatchLayout {
    /// Batches of `n_batch` consecutive indices; the last may be short.
    pub fn regular(n_batch: usize, t_max: usize) -> Result<Self> {
        if n_batch == 0 {
            return Err(Error::ZeroBatchSize);
        }
        if t_max == 0 {
            return Err(Error::ZeroHorizon);
        }
        let bounds = (0..t_max.div_ceil(n_batch))
            .map(|b| (b * n_batch + 1, ((b + 1) * n_batch).min(t_max)))
            .collect();
        Ok(Self { bounds })
    }

    /// Explicit bounds; must start at 1, be contiguous, and be nonempty.
    pub fn from_bounds(bounds: Vec<(usize, usize)>) -> Result<Self> {
        let mut expected_start = 1usize;
        for (pos, &(start, end)) in bounds.iter().enumerate() {
            if start != expected_start || end < start {
                return Err(Error::EmptyBatch { batch: pos + 1 });
            }
            expected_start = end + 1;
        }
        if bounds.is_empty() {
            return Err(Error::EmptyBatch { batch: 1 });
        }
        Ok(Self { bounds })
    }

    pub fn count(&self) -> usize {
        self.bounds.len()
    }

    /// Total number of indices covered.
    pub fn total(&self) -> usize {
        self.bounds.last().map_or(0, |&(_, end)| end)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bounds.iter().copied()
    }
}

/// Naive-BH: BH run separately in each batch at level `alpha / K`, where `K`
/// is the number of batches. Decisions are final at each batch deadline.
pub fn naive_bh(p: &[f64], layout: &BatchLayout, alpha: f64) -> Result<DecisionTrace> {
    validate_p(p)?;
    validate_alpha(alpha)?;
    check_layout(p, layout)?;
    let level = alpha / layout.count() as f64;
    Ok(run_batchwise(p, layout, |_, _| level))
}

/// Tail cutoff of the within-batch null-proportion estimate.
const STOREY_LAMBDA: f64 = 0.5;

/// Adaptive batchwise BH: discovery-credited, rank-wise step-up thresholds
/// with a within-batch null-proportion correction. Its validity leans on
/// test statistics that are independent within and across batches.
///
/// Batch `s` (1-based) rejects its `j` smallest p-values at the largest `j`
/// with `p_(j) <= (alpha * gamma_s / pi0_s) * (j + R_{1:s-1} + H_{s-1}) / n_s`:
///
/// - `pi0_s = min(1, (1 + #{p in batch > 0.5}) / (0.5 * n_s))` is the
///   Storey-style estimate of the batch's null fraction; estimating it needs
///   within-batch independence, and under positive within-batch correlation
///   it dips exactly in the trials where null p-values cluster low,
///   inflating FDR;
/// - `R_{1:s-1}` counts all earlier rejections;
/// - `H_{s-1}` adds each earlier *discovering* batch's leave-one-out slack:
///   for a batch `r` with at least one rejection, `R_r^+ - R_r`, where
///   `R_r^+` reruns batch `r` with its largest p-value replaced by 0.
///
/// With equal per-hypothesis weight (`gamma_s = n_s / t_max`) the thresholds
/// are pointwise at least those of the active-window step-up with the same
/// credit, so its rejection set contains TOAD's on every instance. With one
/// batch of weight 1 it is adaptive BH at level `alpha`; with batches of
/// size one it is a LORD-flavored rule whose credit grows with discoveries.
pub fn batch_bh(
    p: &[f64],
    layout: &BatchLayout,
    alpha: f64,
    batch_weights: &[f64],
) -> Result<DecisionTrace> {
    validate_p(p)?;
    validate_alpha(alpha)?;
    check_layout(p, layout)?;
    validate_weight_sequence(batch_weights, layout.count())?;

    let mut total_rejections = 0usize;
    let mut slack = 0usize;
    let mut batch_index = 0usize;
    Ok(run_batchwise_with(p, layout, |batch_p, rejected_here| {
        let gamma = batch_weights[batch_index];
        let over = batch_p.iter().filter(|&&v| v > STOREY_LAMBDA).count();
        let pi0 = ((1.0 + over as f64) / (batch_p.len() as f64 * (1.0 - STOREY_LAMBDA))).min(1.0);
        let scale = alpha * gamma / pi0;
        let credit = total_rejections + slack;
        let rejected = step_up_credited(batch_p, scale, credit);

        if !rejected.is_empty() {
            // Leave-one-out slack earned by a discovering batch.
            let mut boosted = batch_p.to_vec();
            if let Some(pos) = argmax(&boosted) {
                boosted[pos] = 0.0;
            }
            let plus = step_up_credited(&boosted, scale, credit).len();
            slack += plus.saturating_sub(rejected.len());
            total_rejections += rejected.len();
        }

        batch_index += 1;
        rejected_here.extend(rejected);
    }))
}

/// Step-up against `p_(j) <= scale * (j + credit) / n`.
fn step_up_credited(p: &[f64], scale: f64, credit: usize) -> Vec<usize> {
    let n = p.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut count = 0;
    for j in (1..=n).rev() {
        if p[order[j - 1]] <= scale * (j + credit) as f64 / n as f64 {
            count = j;
            break;
        }
    }
    order.truncate(count);
    order
}

/// Batchwise BH for positively dependent statistics within batches
/// (independent across batches): batch `s` runs BH at level
/// `alpha_s = gamma_s * alpha * (n_s + R_{1:s-1}) / n_s`.
///
/// With batches of size one this is exactly LOND with `a_t = gamma_t`; with a
/// single batch of equal weight it is BH at level `alpha`.
pub fn batch_bh_prds(
    p: &[f64],
    layout: &BatchLayout,
    alpha: f64,
    batch_weights: &[f64],
) -> Result<DecisionTrace> {
    validate_p(p)?;
    validate_alpha(alpha)?;
    check_layout(p, layout)?;
    validate_weight_sequence(batch_weights, layout.count())?;

    let mut total_rejections = 0usize;
    let mut batch_index = 0usize;
    Ok(run_batchwise_with(p, layout, |batch_p, rejected_here| {
        let n = batch_p.len() as f64;
        let level = batch_weights[batch_index] * alpha * (n + total_rejections as f64) / n;
        let rejected = step_up(batch_p, level);
        total_rejections += rejected.len();
        batch_index += 1;
        rejected_here.extend(rejected);
    }))
}

/// A comparator procedure together with its parameters.
pub enum Baseline {
    Lond { weights: Vec<f64> },
    LondReshaped { weights: Vec<f64>, shapes: Vec<ShapeFunction> },
    Bh,
    NaiveBh { layout: BatchLayout },
    BatchBh { layout: BatchLayout, batch_weights: Vec<f64> },
    BatchBhPrds { layout: BatchLayout, batch_weights: Vec<f64> },
}

impl Baseline {
    pub fn run(&self, p: &[f64], alpha: f64) -> Result<DecisionTrace> {
        match self {
            Baseline::Lond { weights } => lond(p, weights, alpha),
            Baseline::LondReshaped { weights, shapes } => lond_reshaped(p, weights, alpha, shapes),
            Baseline::Bh => {
                let rejected = bh(p, alpha)?;
                Ok(DecisionTrace::single_final_stage(p.len(), rejected))
            }
            Baseline::NaiveBh { layout } => naive_bh(p, layout, alpha),
            Baseline::BatchBh { layout, batch_weights } => batch_bh(p, layout, alpha, batch_weights),
            Baseline::BatchBhPrds { layout, batch_weights } => {
                batch_bh_prds(p, layout, alpha, batch_weights)
            }
        }
    }
}

/// Runs a fixed-level BH in every batch, emitting decisions at deadlines.
fn run_batchwise(p: &[f64], layout: &BatchLayout, level: impl Fn(usize, &[f64]) -> f64) -> DecisionTrace {
    let mut batch_index = 0usize;
    run_batchwise_with(p, layout, |batch_p, rejected_here| {
        let rejected = step_up(batch_p, level(batch_index, batch_p));
        batch_index += 1;
        rejected_here.extend(rejected);
    })
}

/// Shared batch loop: `decide` fills the 0-based positions rejected within
/// the batch; the trace gets them at the batch's final stage.
fn run_batchwise_with(
    p: &[f64],
    layout: &BatchLayout,
    mut decide: impl FnMut(&[f64], &mut Vec<usize>),
) -> DecisionTrace {
    let mut trace = DecisionTrace::new();
    for (start, end) in layout.iter() {
        let batch_p = &p[start - 1..end];
        let mut local = Vec::new();
        decide(batch_p, &mut local);
        for _ in start..end {
            trace.push_stage(StageDelta::default());
        }
        let mut added: Vec<usize> = local.into_iter().map(|pos| start + pos).collect();
        added.sort_unstable();
        trace.push_stage(StageDelta { added, removed: Vec::new(), step_up_rank: 0 });
    }
    trace
}

fn argmax(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(pos, _)| pos)
}

fn validate_p(p: &[f64]) -> Result<()> {
    for (pos, &value) in p.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidPValue { index: pos + 1, value });
        }
    }
    Ok(())
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    Ok(())
}

fn validate_weight_sequence(weights: &[f64], expected: usize) -> Result<()> {
    if weights.len() != expected {
        return Err(Error::LengthMismatch { expected, actual: weights.len() });
    }
    let mut sum = 0.0;
    for (pos, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeight { index: pos + 1, weight: w });
        }
        sum += w;
    }
    if sum > 1.0 + BUDGET_TOLERANCE {
        return Err(Error::BudgetExceeded { sum });
    }
    Ok(())
}

fn check_layout(p: &[f64], layout: &BatchLayout) -> Result<()> {
    if layout.total() != p.len() {
        return Err(Error::LayoutMismatch { expected: p.len(), actual: layout.total() });
    }
    Ok(())
}
