use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::oracle::{pinv_oracle, projectors};
use crate::random::{random_matrix, SeededRng};
use crate::svd::svd;
use crate::tolerance::Tolerance;

/// Pseudoinverse of `A1 + A2` for square matrices with additive ranks:
///
/// `(I − P1†) A1† (I − P2†) + P1† A2† P2†` with
/// `P1 = P_{R(A2*)} P_{N(A1)}` and `P2 = P_{N(A1*)} P_{R(A2)}`.
pub fn fill_fishkind_pinv(a1: &Matrix, a2: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    if !a1.is_square() || a1.shape() != a2.shape() {
        return Err(Error::DimensionMismatch {
            context: "rank-additive pair",
            expected: "two square matrices of equal order".into(),
            found: format!("{}x{} and {}x{}", a1.rows(), a1.cols(), a2.rows(), a2.cols()),
        });
    }
    check_rank_additivity(a1, a2, tol)?;
    let n = a1.rows();
    let p_a1 = projectors(a1, tol)?;
    let p_a2 = projectors(a2, tol)?;
    let p1 = pinv_oracle(&(&p_a2.corange * &p_a1.null), tol)?;
    let p2 = pinv_oracle(&(&p_a1.left_null * &p_a2.range), tol)?;
    let id = Matrix::identity(n);
    let first = &(&(&id - &p1) * &pinv_oracle(a1, tol)?) * &(&id - &p2);
    let second = &(&p1 * &pinv_oracle(a2, tol)?) * &p2;
    Ok(&first + &second)
}

/// Numerical ranks must add up exactly; a singular value sitting on the
/// cutoff counts as zero, so borderline pairs are rejected.
pub fn check_rank_additivity(a1: &Matrix, a2: &Matrix, tol: &Tolerance) -> Result<()> {
    let r1 = svd(a1, tol)?.rank;
    let r2 = svd(a2, tol)?.rank;
    let rs = svd(&(a1 + a2), tol)?.rank;
    if rs != r1 + r2 {
        return Err(Error::RankAdditivity { sum: rs, parts: r1 + r2 });
    }
    Ok(())
}

/// Draws random low-rank square pairs until one is rank additive; the
/// generic case succeeds on the first draw when `r1 + r2 <= n`.
pub fn gen_rank_additive_pair(rng: &mut SeededRng, n: usize, r1: usize, r2: usize, tol: &Tolerance) -> Result<(Matrix, Matrix)> {
    if r1 + r2 > n || r1 == 0 || r2 == 0 {
        return Err(Error::InvalidParameter(format!("need 1 <= r1, r2 and r1 + r2 <= {n}")));
    }
    for _ in 0..64 {
        let a1 = &random_matrix(rng, n, r1) * &random_matrix(rng, r1, n);
        let a2 = &random_matrix(rng, n, r2) * &random_matrix(rng, r2, n);
        if check_rank_additivity(&a1, &a2, tol).is_ok() {
            return Ok((a1, a2));
        }
    }
    Err(Error::Invariant("no rank-additive pair found in 64 draws".into()))
}
