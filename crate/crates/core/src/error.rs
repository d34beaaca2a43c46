use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("noise variance at user {index} must be positive and finite, got {value}")]
    NonPositiveVariance { index: usize, value: f64 },
    #[error("power must be positive and finite, got {0}")]
    NonPositivePower(f64),
    #[error("bandwidth mismatch factor must be positive and finite, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("noise variances must be non-increasing (N[{index}] = {prev} < N[{}] = {next})", index + 1)]
    UnsortedNoise { index: usize, prev: f64, next: f64 },
    #[error("channel must have at least one user")]
    NoUsers,
    #[error("index {index} out of range for {len} users")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("dimension mismatch: channel has {expected} users, argument has {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("distortion at user {index} must lie in (0, 1], got {value}")]
    OutOfRange { index: usize, value: f64 },
    #[error("distortions must be non-increasing (d[{index}] = {prev} < d[{}] = {next})", index + 1)]
    NotMonotone { index: usize, prev: f64, next: f64 },
    #[error("invalid tau at position {index}: {reason}")]
    InvalidTau { index: usize, reason: &'static str },
    #[error("rate at user {index} must be non-negative and finite, got {value}")]
    NegativeRate { index: usize, value: f64 },
    #[error("no boundary point: {0}")]
    NoSolution(&'static str),
    #[error("region evaluator is not monotone on the bracket")]
    NotMonotoneRegion,
    #[error("degenerate denominator in the tau recursion at user {index} (alpha - d = {gap})")]
    DegenerateDenominator { index: usize, gap: f64 },
    #[error("labels are not the ones produced by the relaxation of this vector")]
    InconsistentLabels,
    #[error("mode precondition failed: {0}")]
    ModePreconditionFailed(&'static str),
    #[error("invalid auxiliary noise parameters: {0}")]
    InvalidAuxParams(&'static str),
    #[error("at least {min} samples are required, got {actual}")]
    InsufficientSamples { min: usize, actual: usize },
}
