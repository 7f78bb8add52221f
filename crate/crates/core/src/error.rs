use thiserror::Error;

use crate::geometry::Manifold;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("manifold mismatch: expected {expected}, found {found}")]
    ManifoldMismatch { expected: Manifold, found: Manifold },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid tangent vector: {0}")]
    InvalidTangent(String),

    /// The logarithm is not single-valued (antipodal points, rotation angle π).
    #[error("points lie on the cut locus ({0})")]
    CutLocus(&'static str),

    /// A sphere step of length `norm` leaves the injectivity radius π.
    #[error("step of length {norm} exceeds the injectivity radius")]
    StepTooLarge { norm: f64 },

    #[error("tangent vector is attached to a different base point (offset {offset:e})")]
    BaseMismatch { offset: f64 },

    #[error("operation requires the SO3 backend, got {0}")]
    NotRotationGroup(Manifold),

    #[error("weights must sum to 1 (sum = {sum})")]
    InvalidWeights { sum: f64 },

    #[error("{points} points but {weights} weights")]
    WeightCount { points: usize, weights: usize },

    #[error("Karcher iteration did not converge after {iterations} steps (residual {residual:e})")]
    KarcherNoConvergence { iterations: usize, residual: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("sequence length {0} must be even")]
    OddLength(usize),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("sequence length {len} is not divisible by 2^{levels}")]
    IndivisibleLength { len: usize, levels: usize },

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Repeated upscaling did not contract step sizes.
    #[error("no contraction observed (fitted ratio {mu_hat})")]
    NotContractive { mu_hat: f64, steps: Vec<f64> },

    #[error("at index {index}: {source}")]
    AtIndex { index: usize, source: Box<Error> },

    #[error("at level {level}: {source}")]
    AtLevel { level: usize, source: Box<Error> },
}

impl Error {
    pub fn at_index(self, index: usize) -> Self {
        Error::AtIndex { index, source: Box::new(self) }
    }

    pub fn at_level(self, level: usize) -> Self {
        Error::AtLevel { level, source: Box::new(self) }
    }

    /// Pyramid level attached to this error, if any.
    pub fn level(&self) -> Option<usize> {
        match self {
            Error::AtLevel { level, .. } => Some(*level),
            Error::AtIndex { source, .. } => source.level(),
            _ => None,
        }
    }

    /// Sequence index attached to this error, if any.
    pub fn index(&self) -> Option<usize> {
        match self {
            Error::AtIndex { index, .. } => Some(*index),
            Error::AtLevel { source, .. } => source.index(),
            _ => None,
        }
    }

    /// The error with all positional context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtIndex { source, .. } | Error::AtLevel { source, .. } => source.root(),
            e => e,
        }
    }
}
