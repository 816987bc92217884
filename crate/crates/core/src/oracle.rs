//! SVD-based reference pseudoinverse and the four fundamental projectors.

use crate::error::Result;
use crate::linalg::hermitian_solve;
use crate::matrix::{Matrix, C64};
use crate::svd::{svd, SvdFactorization};
use crate::tolerance::Tolerance;

/// `V Σ† U*`, inverting only singular values above the rank cutoff.
pub fn pinv_oracle(a: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    Ok(pinv_from_svd(&svd(a, tol)?))
}

pub fn pinv_from_svd(f: &SvdFactorization) -> Matrix {
    let (m, n) = (f.u.rows(), f.v.rows());
    Matrix::from_fn(n, m, |i, j| {
        (0..f.rank)
            .map(|k| f.v.get(i, k) * f.u.get(j, k).conj() / f.sigma[k])
            .sum::<C64>()
    })
}

/// Orthogonal projectors onto the four fundamental subspaces of `A`.
#[derive(Debug, Clone)]
pub struct Projectors {
    /// `P_{R(A)}`, rows x rows.
    pub range: Matrix,
    /// `P_{N(A*)}`, rows x rows.
    pub left_null: Matrix,
    /// `P_{R(A*)}`, cols x cols.
    pub corange: Matrix,
    /// `P_{N(A)}`, cols x cols.
    pub null: Matrix,
}

impl Projectors {
    pub fn from_svd(f: &SvdFactorization) -> Self {
        let proj = |q: &Matrix, cols: std::ops::Range<usize>| {
            let n = q.rows();
            Matrix::from_fn(n, n, |i, j| cols.clone().map(|k| q.get(i, k) * q.get(j, k).conj()).sum())
        };
        Self {
            range: proj(&f.u, 0..f.rank),
            left_null: proj(&f.u, f.rank..f.u.cols()),
            corange: proj(&f.v, 0..f.rank),
            null: proj(&f.v, f.rank..f.v.cols()),
        }
    }

    pub fn into_tuple(self) -> (Matrix, Matrix, Matrix, Matrix) {
        (self.range, self.left_null, self.corange, self.null)
    }
}

pub fn projectors(a: &Matrix, tol: &Tolerance) -> Result<Projectors> {
    Ok(Projectors::from_svd(&svd(a, tol)?))
}

/// Pseudoinverse through the normal equations: a direct Hermitian solve when
/// `A` has full column or row rank, `(A*A)† A*` otherwise.
pub fn pinv_normal_equations(a: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    let (m, n) = a.shape();
    let rank = svd(a, tol)?.rank;
    let ah = a.adjoint();
    if rank == n {
        if let Ok(x) = hermitian_solve(&(&ah * a), &ah) {
            return Ok(x);
        }
    } else if rank == m {
        if let Ok(y) = hermitian_solve(&(a * &ah), a) {
            return Ok(y.adjoint());
        }
    }
    Ok(&pinv_oracle(&(&ah * a), tol)? * &ah)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_repeated_columns, seeded_rng};

    fn r(rows: &[&[f64]]) -> Matrix {
        Matrix::from_real_rows(rows)
    }

    #[test]
    fn oracle_examples() {
        let tol = Tolerance::default();
        assert!(pinv_oracle(&Matrix::identity(2), &tol).unwrap().distance(&Matrix::identity(2)) < 1e-15);
        let x = pinv_oracle(&Matrix::diag_real(&[2.0, 0.0]), &tol).unwrap();
        assert!(x.distance(&Matrix::diag_real(&[0.5, 0.0])) < 1e-15);
        let a = Matrix::outer_real(&[1.0, 1.0], &[1.0, 0.0, 0.0]);
        let x = pinv_oracle(&a, &tol).unwrap();
        assert_eq!(x.shape(), (3, 2));
        assert!(x.distance(&r(&[&[0.5, 0.5], &[0.0, 0.0], &[0.0, 0.0]])) < 1e-15);
    }

    #[test]
    fn zero_matrix_pinv_is_transposed_zero() {
        let x = pinv_oracle(&Matrix::zeros(2, 3), &Tolerance::default()).unwrap();
        assert_eq!(x, Matrix::zeros(3, 2));
    }

    #[test]
    fn normal_equation_examples() {
        let tol = Tolerance::default();
        let x = pinv_normal_equations(&Matrix::column_real(&[1.0, 1.0]), &tol).unwrap();
        assert!(x.distance(&r(&[&[0.5, 0.5]])) < 1e-15);
        assert!(pinv_normal_equations(&Matrix::identity(2), &tol).unwrap().distance(&Matrix::identity(2)) < 1e-15);
        let a = random_matrix(&mut seeded_rng(2), 3, 5);
        let d = pinv_normal_equations(&a, &tol).unwrap().distance(&pinv_oracle(&a, &tol).unwrap());
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn normal_equations_rank_deficient() {
        let tol = Tolerance::default();
        let a = random_repeated_columns(&mut seeded_rng(9), 6, 5, 3);
        let x = pinv_oracle(&a, &tol).unwrap();
        let d = pinv_normal_equations(&a, &tol).unwrap().distance(&x);
        assert!(d <= 1e-9 * x.frobenius_norm(), "{d}");
    }

    #[test]
    fn projector_examples() {
        let tol = Tolerance::default();
        let p = projectors(&Matrix::diag_real(&[1.0, 0.0]), &tol).unwrap();
        let (e1, e2) = (Matrix::diag_real(&[1.0, 0.0]), Matrix::diag_real(&[0.0, 1.0]));
        assert!(p.range.distance(&e1) < 1e-15 && p.left_null.distance(&e2) < 1e-15);
        assert!(p.corange.distance(&e1) < 1e-15 && p.null.distance(&e2) < 1e-15);
        let e = [1.0; 3];
        let p = projectors(&Matrix::outer_real(&e, &e), &tol).unwrap();
        assert!(p.range.distance(&Matrix::outer_real(&e, &e).scale_real(1.0 / 3.0)) < 1e-14);
    }
}
