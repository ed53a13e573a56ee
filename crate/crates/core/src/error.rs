use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires at least one stored curvature pair")]
    EmptyHistory,

    /// Every direction of `Ψ` fell below the rank threshold although pairs
    /// are stored. Callers treat `B̂` as `γ⊥I`.
    #[error("curvature history is fully degenerate (numerical rank 0)")]
    DegenerateHistory,

    #[error("parallel subspace is empty")]
    NoParallelSubspace,

    #[error("numerically singular {0}")]
    Singular(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown problem `{0}`")]
    ProblemNotFound(String),
}
