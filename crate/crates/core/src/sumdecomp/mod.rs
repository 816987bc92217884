//! Pseudoinverses of sums: orthogonal families, rank completion, pair
//! completion and the rank-additive two-term formula.
//!
//! Member indices (`k0`) are zero-based throughout.

mod completion;
mod family;
mod fill_fishkind;

pub use completion::{
    completion_pinv_pair, rank_completion_pinv, Completion, CompletionData, CompletionPath, CompletionResult, PairMode,
    PairResult,
};
pub use family::{
    check_orthogonality, common_null_projector, gen_shared_subspace_triple, gen_svd_block_family,
    pinv_invertible_projector_eq, pinv_sum, pinv_via_gram_equation, GramSide, OperatorFamily,
    OrthogonalityCertificate, ProjectorEquationSolution, SumPinv,
};
pub use fill_fishkind::{check_rank_additivity, fill_fishkind_pinv, gen_rank_additive_pair};
