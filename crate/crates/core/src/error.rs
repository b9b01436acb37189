//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("p-value at index {index} is {value}, outside [0, 1]")]
    InvalidPValue { index: usize, value: f64 },
    #[error("truth mask has {mask} entries but the stream has {stream}")]
    MaskLengthMismatch { mask: usize, stream: usize },
    #[error("batch size must be positive")]
    ZeroBatchSize,
    #[error("deadline {deadline} for index {index} precedes the index itself")]
    DeadlineBeforeIndex { index: usize, deadline: usize },
    #[error("index {index} is outside the schedule of length {len}")]
    IndexOutsideSchedule { index: usize, len: usize },
    #[error("alpha is {alpha}, must lie strictly inside (0, 1)")]
    AlphaOutOfRange { alpha: f64 },
    #[error("shape support point {value} is not strictly positive")]
    SupportNotPositive { value: f64 },
    #[error("shape probability {value} is invalid")]
    InvalidProbability { value: f64 },
    #[error("shape probabilities sum to {sum}, not 1")]
    ProbabilityMassNotOne { sum: f64 },
    #[error("shape support is empty")]
    EmptySupport,
    #[error("shape evaluated at negative argument {r}")]
    NegativeShapeArgument { r: f64 },
    #[error("horizon must be positive")]
    ZeroHorizon,
    #[error("stage {stage} is past the declared horizon {horizon}")]
    PastHorizon { stage: usize, horizon: usize },
    #[error("masked history entry at index {index} is {value}, not in [0, 1] or -1")]
    InvalidMaskedEntry { index: usize, value: f64 },
    #[error("weight for index {index} is {weight}, must be finite and nonnegative")]
    InvalidWeight { index: usize, weight: f64 },
    #[error("realized weight budget {sum} exceeds 1")]
    BudgetExceeded { sum: f64 },
    #[error("active-window weight budget {sum} exceeds 1 at stage {stage}")]
    WindowBudgetExceeded { stage: usize, sum: f64 },
    #[error("commit stage {commit_stage} for index {index} is not in 0..index")]
    CommitStageOutOfRange { index: usize, commit_stage: usize },
    #[error("cannot stop: the weight for index {index} is already committed and positive")]
    StopAfterCommitment { index: usize },
    #[error("reorder plan references unknown hypothesis {index}")]
    UnknownHypothesis { index: usize },
    #[error("reorder plan must name at least two hypotheses")]
    ReorderPlanTooSmall,
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("batch {batch} of the layout is empty or malformed")]
    EmptyBatch { batch: usize },
    #[error("batch layout does not partition 1..={expected} (covers {actual})")]
    LayoutMismatch { expected: usize, actual: usize },
    #[error("decision for index {index} changed at stage {stage} after its deadline")]
    LateUpdate { stage: usize, index: usize },
    #[error("rejection of index {index} was reversed at stage {stage}")]
    RejectionReversed { stage: usize, index: usize },
    #[error("stage {stage} is outside the trace of {stages} stages")]
    StageOutsideTrace { stage: usize, stages: usize },
    #[error("metric requires a truth mask, but the stream carries none")]
    MissingTruthMask,
    #[error("aggregation needs at least two trials, got {count}")]
    TooFewTrials { count: usize },
    #[error("correlation {rho} is outside [0, 1)")]
    RhoOutOfRange { rho: f64 },
    #[error("fraction of false nulls {pi1} is outside [0, 1]")]
    Pi1OutOfRange { pi1: f64 },
}
