//! False discovery proportions, power, and Monte Carlo aggregation.
//!
//! `fdp` is the realized proportion `|H_0 ∩ R_t| / (1 v |R_t|)`; its
//! decaying-memory variant intersects with the active set first. Campaign
//! means over independent trials estimate FDR and power, with standard
//! errors `sqrt(sample variance / iterations)`.

use alloc::vec::Vec;

use crate::deadline::DeadlineSchedule;
use crate::error::{Error, Result};
use crate::trace::DecisionTrace;

/// Realized false discovery proportion at `stage`:
/// `|H_0 ∩ R_t| / (1 v |R_t|)`. `truth_mask[i-1]` marks true nulls.
pub fn fdp(trace: &DecisionTrace, truth_mask: &[bool], stage: usize) -> Result<f64> {
    let rejected = trace.rejection_set_at(stage)?;
    let false_rejections = rejected.iter().filter(|&&i| truth_mask[i - 1]).count();
    Ok(false_rejections as f64 / rejected.len().max(1) as f64)
}

/// Decaying-memory false discovery proportion at `stage`:
/// `|H_0 ∩ R_t ∩ C_t| / (1 v |R_t ∩ C_t|)`.
pub fn fdp_recent(
    trace: &DecisionTrace,
    truth_mask: &[bool],
    deadlines: &DeadlineSchedule,
    stage: usize,
) -> Result<f64> {
    let rejected = trace.rejection_set_at(stage)?;
    let mut active = 0usize;
    let mut false_active = 0usize;
    for &i in &rejected {
        if deadlines.is_active(i, stage) {
            active += 1;
            if truth_mask[i - 1] {
                false_active += 1;
            }
        }
    }
    Ok(false_active as f64 / active.max(1) as f64)
}

/// Fraction of false nulls rejected by `stage`: `|R_t ∩ !H_0| / |!H_0|`;
/// 0 when there are no false nulls.
pub fn power_at(trace: &DecisionTrace, truth_mask: &[bool], stage: usize) -> Result<f64> {
    let alternatives = truth_mask.iter().filter(|&&null| !null).count();
    if alternatives == 0 {
        return Ok(0.0);
    }
    let hit = trace
        .rejection_set_at(stage)?
        .iter()
        .filter(|&&i| !truth_mask[i - 1])
        .count();
    Ok(hit as f64 / alternatives as f64)
}

/// [`power_at`] evaluated at the final recorded stage.
pub fn power_final(trace: &DecisionTrace, truth_mask: &[bool]) -> f64 {
    match trace.stages() {
        0 => 0.0,
        stages => power_at(trace, truth_mask, stages).expect("stage within trace"),
    }
}

/// Final-stage statistics of one simulated trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    pub fdp_final: f64,
    pub fdp_recent_final: f64,
    pub power: f64,
}

impl TrialMetrics {
    pub fn from_trace(
        trace: &DecisionTrace,
        truth_mask: &[bool],
        deadlines: &DeadlineSchedule,
    ) -> Result<Self> {
        let stages = trace.stages();
        if stages == 0 {
            return Ok(Self { fdp_final: 0.0, fdp_recent_final: 0.0, power: 0.0 });
        }
        Ok(Self {
            fdp_final: fdp(trace, truth_mask, stages)?,
            fdp_recent_final: fdp_recent(trace, truth_mask, deadlines, stages)?,
            power: power_final(trace, truth_mask),
        })
    }
}

/// Per-cell campaign aggregate with Monte Carlo standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignSummary {
    pub mean_fdr: f64,
    pub se_fdr: f64,
    pub mean_power: f64,
    pub se_power: f64,
    pub iterations: usize,
}

/// Mean and Monte Carlo standard error `sqrt(s^2 / n)` of a sample, with the
/// Bessel-corrected sample variance `s^2`. Needs at least two values.
pub fn mean_and_se(values: &[f64]) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewTrials { count: n });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let variance =
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    Ok((mean, libm::sqrt(variance / n as f64)))
}

/// Aggregates trials on the standard statistics (final FDP and power).
pub fn aggregate(trials: &[TrialMetrics]) -> Result<CampaignSummary> {
    summarize(trials, |t| t.fdp_final)
}

/// Aggregates trials on the decaying-memory FDP instead of the standard one.
pub fn aggregate_recent(trials: &[TrialMetrics]) -> Result<CampaignSummary> {
    summarize(trials, |t| t.fdp_recent_final)
}

fn summarize(trials: &[TrialMetrics], fdr_stat: impl Fn(&TrialMetrics) -> f64) -> Result<CampaignSummary> {
    let fdr: Vec<f64> = trials.iter().map(&fdr_stat).collect();
    let power: Vec<f64> = trials.iter().map(|t| t.power).collect();
    let (mean_fdr, se_fdr) = mean_and_se(&fdr)?;
    let (mean_power, se_power) = mean_and_se(&power)?;
    Ok(CampaignSummary { mean_fdr, se_fdr, mean_power, se_power, iterations: trials.len() })
}
