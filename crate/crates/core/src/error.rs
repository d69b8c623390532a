use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("outcome list is empty")]
    EmptyOutcomeList,
    #[error("outcomes[{index}] weight: {value} is negative")]
    NegativeWeight { index: usize, value: f64 },
    #[error("outcomes[..] weight: weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },
    #[error("outcomes[{index}] success_prob: {value} is outside [0, 1]")]
    SuccessProbOutOfRange { index: usize, value: f64 },
    #[error("y[{index}]: {value} is outside [0, 1]")]
    StrategyOutOfRange { index: usize, value: f64 },
    #[error("strategy has {strategy} entries but the trial has {trial} outcomes")]
    LengthMismatch { trial: usize, strategy: usize },
    #[error("expected a trial with {expected} outcomes, got {actual}")]
    WrongArity { expected: usize, actual: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("invalid distribution parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("cannot parse distribution spec: {0}")]
    InvalidDistributionSpec(&'static str),
    #[error("invalid scenario: {0}")]
    InvalidScenario(&'static str),
    #[error("degenerate realization: {0}")]
    DegenerateRealization(&'static str),
    #[error("null value {0} must lie strictly inside (0, 1)")]
    InvalidNull(f64),
    #[error("sample is empty")]
    EmptySample,
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error("partition size must be at least 1")]
    ZeroPartitionSize,
}
