//! Hypothesis streams: ordered p-values with an optional simulation truth mask.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// An ordered sequence of p-values `P_1, P_2, ...`, optionally annotated with
/// which hypotheses are true nulls (only available in simulation).
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisStream {
    p_values: Vec<f64>,
    truth_mask: Option<Vec<bool>>,
}

impl HypothesisStream {
    pub fn new(p_values: Vec<f64>) -> Result<Self> {
        validate_p_values(&p_values)?;
        Ok(Self { p_values, truth_mask: None })
    }

    /// `truth_mask[i-1]` is true when hypothesis `i` is a true null.
    pub fn with_truth_mask(p_values: Vec<f64>, truth_mask: Vec<bool>) -> Result<Self> {
        validate_p_values(&p_values)?;
        if truth_mask.len() != p_values.len() {
            return Err(Error::MaskLengthMismatch {
                mask: truth_mask.len(),
                stream: p_values.len(),
            });
        }
        Ok(Self { p_values, truth_mask: Some(truth_mask) })
    }

    pub fn len(&self) -> usize {
        self.p_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_values.is_empty()
    }

    /// P-value of hypothesis `index` (1-based).
    pub fn p_value(&self, index: usize) -> f64 {
        self.p_values[index - 1]
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    pub fn truth_mask(&self) -> Option<&[bool]> {
        self.truth_mask.as_deref()
    }

    /// Whether hypothesis `index` is a true null, when the mask is present.
    pub fn is_true_null(&self, index: usize) -> Option<bool> {
        self.truth_mask.as_ref().map(|m| m[index - 1])
    }
}

fn validate_p_values(p_values: &[f64]) -> Result<()> {
    for (pos, &p) in p_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPValue { index: pos + 1, value: p });
        }
    }
    Ok(())
}
