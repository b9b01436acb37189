//! Adaptive hypothesis reordering through stage duplication.
//!
//! A researcher who wants to test some hypotheses in a data-dependent order
//! can expand the stream: list every base hypothesis once, then append a
//! second copy of the adaptively ordered ones. Weight options then route the
//! budget either through a hypothesis's original slot or through its copy,
//! and ignored slots (weight 0) are skipped. For three base hypotheses with
//! the last two adaptive, the expanded five-stage layout and its two weight
//! options are:
//!
//! | stage | hypothesis | option "2 first" | option "3 first" |
//! |-------|------------|------------------|------------------|
//! | 1     | 1          | 1/3              | 1/3              |
//! | 2     | 2          | 1/3              | 0                |
//! | 3     | 3          | 0                | 1/3              |
//! | 4     | 2          | 0                | 1/3              |
//! | 5     | 3          | 1/3              | 0                |
//!
//! The choice between options can be made after observing the stage-1
//! p-value. The same construction scales to any number of hypotheses.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::policy::ThresholdPolicy;

/// An expanded stream layout with one weight option per possible first pick.
#[derive(Debug, Clone, PartialEq)]
pub struct ReorderLayout {
    /// Base hypothesis id (1-based) tested at each expanded stage.
    pub stage_hypothesis: Vec<usize>,
    /// Which base hypotheses are adaptively ordered, in copy order.
    pub adaptive: Vec<usize>,
    /// `options[k]` are the per-stage weights when `adaptive[k]` is tested
    /// first; every option sums to 1.
    pub options: Vec<Vec<f64>>,
}

impl ReorderLayout {
    pub fn stages(&self) -> usize {
        self.stage_hypothesis.len()
    }
}

/// Builds the duplicated layout for `n_base` hypotheses of which `adaptive`
/// (1-based ids, at least two) are tested in an adaptive order.
pub fn reorder_scenario(n_base: usize, adaptive: &[usize]) -> Result<ReorderLayout> {
    if adaptive.len() < 2 {
        return Err(Error::ReorderPlanTooSmall);
    }
    for &id in adaptive {
        if id == 0 || id > n_base {
            return Err(Error::UnknownHypothesis { index: id });
        }
    }
    for (pos, &id) in adaptive.iter().enumerate() {
        if adaptive[..pos].contains(&id) {
            return Err(Error::UnknownHypothesis { index: id });
        }
    }

    let mut stage_hypothesis: Vec<usize> = (1..=n_base).collect();
    stage_hypothesis.extend_from_slice(adaptive);

    let share = 1.0 / n_base as f64;
    let options = adaptive
        .iter()
        .map(|&first| {
            stage_hypothesis
                .iter()
                .enumerate()
                .map(|(pos, &hyp)| {
                    let is_copy = pos >= n_base;
                    let weighted = if adaptive.contains(&hyp) {
                        // The first pick spends its weight in the original
                        // slot; the rest spend theirs in the copies.
                        (hyp == first) != is_copy
                    } else {
                        !is_copy
                    };
                    if weighted {
                        share
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();

    Ok(ReorderLayout { stage_hypothesis, adaptive: adaptive.to_vec(), options })
}

/// A weight policy that picks one of a layout's options after stage 1.
///
/// The chooser maps the stage-1 masked entry to an option index; every later
/// weight has commit stage 1, and stage 1 itself is committed upfront.
pub struct ReorderPolicy {
    options: Vec<Vec<f64>>,
    chooser: Box<dyn Fn(f64) -> usize + Send + Sync>,
}

impl ReorderPolicy {
    pub fn new(
        layout: &ReorderLayout,
        chooser: impl Fn(f64) -> usize + Send + Sync + 'static,
    ) -> Self {
        Self { options: layout.options.clone(), chooser: Box::new(chooser) }
    }
}

impl ThresholdPolicy for ReorderPolicy {
    fn commit_stage(&self, index: usize) -> usize {
        if index == 1 {
            0
        } else {
            1
        }
    }

    fn weight(&self, index: usize, observed: &[f64]) -> f64 {
        let choice = if index == 1 {
            0 // every option assigns stage 1 the same weight
        } else {
            (self.chooser)(observed[0]).min(self.options.len() - 1)
        };
        self.options[choice].get(index - 1).copied().unwrap_or(0.0)
    }
}
