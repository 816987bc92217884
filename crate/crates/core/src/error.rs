use thiserror::Error;

/// Errors raised by the pseudoinverse toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix entries must be finite (entry {index} is {value})")]
    NonFinite { index: usize, value: String },

    #[error("invalid matrix shape {rows}x{cols}")]
    InvalidShape { rows: usize, cols: usize },

    #[error("SVD did not converge within the budget of {budget} Jacobi sweeps")]
    SvdNoConvergence { budget: usize },

    #[error("matrix is singular at the working tolerance ({context})")]
    Singular { context: &'static str },

    #[error("orthogonality certificate fails for members {first} and {second} (residual {residual:.3e})")]
    NotOrthogonal {
        first: usize,
        second: usize,
        residual: f64,
    },

    #[error("index {index} out of range for a family of {len} members")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid completion data: {0}")]
    InvalidCompletion(String),

    #[error("subspace condition violated: {0}")]
    SubspaceCondition(String),

    #[error("rank additivity fails: rank(A1+A2) = {sum}, rank(A1) + rank(A2) = {parts}")]
    RankAdditivity { sum: usize, parts: usize },

    #[error("eigenvalue supports overlap for generators {first} and {second} at indices {indices:?}")]
    SupportOverlap {
        first: usize,
        second: usize,
        indices: Vec<usize>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tree edge weights must sum to zero (sum = {sum})")]
    NotZeroSum { sum: f64 },

    #[error("edge list is not a spanning tree: {0}")]
    NotATree(String),

    #[error("wheel graph needs an odd vertex count >= 5, got {0}")]
    InvalidWheel(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
