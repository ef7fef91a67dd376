use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: surface has rank {expected}, vector has {found} c1 coordinates")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("r and s must have the same parity (r = {r}, s = {s})")]
    Parity { r: String, s: String },

    #[error("zero vector")]
    ZeroVector,

    #[error("vector is not primitive")]
    NotPrimitive,

    #[error("invalid surface model: {0}")]
    InvalidSurface(String),

    #[error("{0} is a perfect square")]
    PerfectSquare(String),

    #[error("no solution: {0}")]
    Insoluble(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("class is not in the lattice: {0}")]
    NotInLattice(String),

    #[error("orientation does not fix an effective half-plane: {0}")]
    Orientation(String),

    #[error("outside the hypotheses of the classification: {0}")]
    OutsideHypotheses(String),

    #[error("iteration cap of {cap} reached: {detail}")]
    IterationCap { cap: usize, detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
