//! Streaming control of the false discovery rate (FDR) under decision deadlines.
//!
//! A stream of hypotheses arrives one per stage. Each hypothesis needs an
//! immediate preliminary decision (reject or not), but the decision may be
//! revised until a preset per-hypothesis deadline passes. The TOAD procedure
//! ("thresholds based on active discoveries") runs a Benjamini-Hochberg-style
//! step-up over the moving window of still-active hypotheses, which lets it
//! reject retroactively without ever reversing a rejection. With all deadlines
//! open it recovers offline BH; with immediate deadlines it recovers the LOND
//! rule of Javanmard & Montanari.
//!
//! Module map:
//!
//! - [`stream`]: hypothesis streams (p-values plus an optional truth mask).
//! - [`deadline`]: deadline schedules and active candidate sets.
//! - [`policy`]: significance-budget policies, masked histories, validation.
//! - [`shape`]: shape functions for FDR control under arbitrary dependence.
//! - [`engine`]: the TOAD state machine, adaptive stopping, decaying memory.
//! - [`reorder`]: adaptive hypothesis reordering via duplicated stages.
//! - [`baselines`]: LOND, reshaped LOND, BH, Naive-BH, and batch BH variants.
//! - [`metrics`]: false discovery proportions, power, Monte Carlo errors.
//! - [`simgen`]: block-correlated Gaussian trial generator for simulations.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only forwards to dependencies.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod deadline;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod policy;
pub mod reorder;
pub mod shape;
pub mod simgen;
pub mod stream;
pub mod trace;

pub use deadline::{Deadline, DeadlineSchedule};
pub use engine::{EngineConfig, Mode, StageReport, StopRule, ToadEngine};
pub use error::{Error, Result};
pub use policy::{MaskedHistory, ThresholdPolicy};
pub use shape::ShapeFunction;
pub use stream::HypothesisStream;
pub use trace::DecisionTrace;
