use thiserror::Error;

/// Errors raised while building or transforming a [`crate::Dataset`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("dataset must contain at least one point and one dimension (n={n}, d={d})")]
    Empty { n: usize, d: usize },
    #[error("data length {len} is not a multiple of dimension {d}")]
    Ragged { len: usize, d: usize },
    #[error("non-finite value {value} at point {point}, coordinate {coord}")]
    NonFinite { point: usize, coord: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("point ids must be strictly increasing and one per point")]
    BadPointIds,
}

/// Errors raised by the D² selection routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    /// Every remaining weight is zero: all points coincide with chosen centers.
    #[error("all weights are zero; fewer distinct points than requested centers")]
    DegenerateWeights,
    #[error("search target {target} outside [0, {total})")]
    TargetOutOfRange { target: f64, total: f64 },
    #[error("prefix sums must be nonempty, nondecreasing and end above zero")]
    BadPrefix,
}

/// Errors raised by the seeding variants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeedError {
    #[error("k={k} is invalid for a dataset of {n} points (need 1 <= k <= n)")]
    InvalidK { k: usize, n: usize },
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Data(#[from] DataError),
}

impl SeedError {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, SeedError::Sampling(SamplingError::DegenerateWeights))
    }
}
