//! Shape functions: nondecreasing transforms that buy FDR control under
//! arbitrary p-value dependence at a power cost.
//!
//! Following Blanchard & Roquain (2008), a shape function is
//! `beta(r) = E[X * 1(X <= r)]` for some probability distribution `nu` on the
//! positive reals. Only finite discrete `nu` is supported here; the one
//! concrete case in routine use is `P(X = x) ∝ 1/x` on `{1, ..., t_max}`,
//! which yields `beta(r) = r / H_{t_max}` at integer ranks and mimics the
//! Benjamini-Yekutieli correction. The identity function is kept as a
//! distinct variant because the positive-dependence FDR guarantee applies to
//! it specifically.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tolerance on the total probability mass of a discrete `nu`.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Identity,
    NuInduced {
        /// Support points, ascending and strictly positive.
        support: Vec<f64>,
        /// Probability of each support point.
        probs: Vec<f64>,
        /// `mass_prefix[k] = sum_{j <= k} support[j] * probs[j]`.
        mass_prefix: Vec<f64>,
    },
}

/// Either the identity or a discrete-`nu`-induced shape function.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeFunction {
    kind: Kind,
}

impl ShapeFunction {
    pub fn identity() -> Self {
        Self { kind: Kind::Identity }
    }

    /// Distinguishes the identity, whose FDR guarantee needs positive dependence.
    pub fn is_identity(&self) -> bool {
        matches!(self.kind, Kind::Identity)
    }

    /// Builds the shape induced by a discrete distribution given as
    /// `(support point, probability)` pairs. Points must be strictly
    /// positive and the probabilities must sum to 1 within
    /// [`PROBABILITY_TOLERANCE`].
    pub fn from_support(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut sorted: Vec<(f64, f64)> = points.to_vec();
        for &(x, p) in &sorted {
            if !x.is_finite() || x <= 0.0 {
                return Err(Error::SupportNotPositive { value: x });
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidProbability { value: p });
            }
        }
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

        let total = kahan_sum(sorted.iter().map(|&(_, p)| p));
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::ProbabilityMassNotOne { sum: total });
        }

        let mut support = Vec::with_capacity(sorted.len());
        let mut probs = Vec::with_capacity(sorted.len());
        let mut mass_prefix = Vec::with_capacity(sorted.len());
        // Compensated running sum keeps the prefix accurate over long supports.
        let mut sum = 0.0;
        let mut carry = 0.0;
        for &(x, p) in &sorted {
            let term = x * p - carry;
            let next = sum + term;
            carry = (next - sum) - term;
            sum = next;
            support.push(x);
            probs.push(p);
            mass_prefix.push(sum);
        }
        Ok(Self { kind: Kind::NuInduced { support, probs, mass_prefix } })
    }

    /// The harmonic shape: `nu` with `P(X = x) ∝ 1/x` on `{1, ..., t_max}`,
    /// so that `beta(r) = r / H_{t_max}` at integer ranks `r <= t_max`.
    pub fn harmonic(t_max: usize) -> Result<Self> {
        if t_max == 0 {
            return Err(Error::ZeroHorizon);
        }
        let h = kahan_sum((1..=t_max).map(|k| 1.0 / k as f64));
        let points: Vec<(f64, f64)> =
            (1..=t_max).map(|k| (k as f64, 1.0 / k as f64 / h)).collect();
        Self::from_support(&points)
    }

    /// `beta(r)`: the identity returns `r`; a `nu`-induced shape returns
    /// `sum_{x_k <= r} x_k * p_k` (ties at `r` included).
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::NegativeShapeArgument { r });
        }
        Ok(self.eval_nonneg(r))
    }

    /// `beta` at an integer rank; the per-stage hot path.
    pub fn at_rank(&self, rank: usize) -> f64 {
        self.eval_nonneg(rank as f64)
    }

    /// Upper bound `E[X]` of a `nu`-induced shape; the identity is unbounded.
    pub fn expectation(&self) -> f64 {
        match &self.kind {
            Kind::Identity => f64::INFINITY,
            Kind::NuInduced { mass_prefix, .. } => *mass_prefix.last().unwrap(),
        }
    }

    /// The `(support, probability)` pairs of a `nu`-induced shape.
    pub fn points(&self) -> Option<Vec<(f64, f64)>> {
        match &self.kind {
            Kind::Identity => None,
            Kind::NuInduced { support, probs, .. } => {
                Some(support.iter().copied().zip(probs.iter().copied()).collect())
            }
        }
    }

    fn eval_nonneg(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Identity => r,
            Kind::NuInduced { support, mass_prefix, .. } => {
                let covered = support.partition_point(|&x| x <= r);
                if covered == 0 {
                    0.0
                } else {
                    mass_prefix[covered - 1]
                }
            }
        }
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let term = v - carry;
        let next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    sum
}
