//! Direct solvers and orthonormalization helpers.

use crate::error::{Error, Result};
use crate::matrix::{vec_dot, vec_norm, Matrix, C64, ONE, ZERO};
use crate::tolerance::UNIT_ROUNDOFF;

/// LU factorization with partial pivoting of a square matrix.
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails with [`Error::Singular`] when a pivot drops below
    /// `n * eps * max|a_ij|`.
    pub fn factor(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                context: "LU factorization",
                expected: "square matrix".into(),
                found: format!("{}x{}", a.rows(), a.cols()),
            });
        }
        let n = a.rows();
        let mut lu = a.data().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = n as f64 * UNIT_ROUNDOFF * a.max_abs();

        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= threshold || pmax == 0.0 {
                return Err(Error::Singular {
                    context: "LU pivot below threshold",
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in (k + 1)..n {
                    let ukj = lu[k * n + j];
                    lu[i * n + j] -= factor * ukj;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if b.rows() != self.n {
            return Err(Error::DimensionMismatch {
                context: "LU solve",
                expected: format!("{} rows", self.n),
                found: format!("{} rows", b.rows()),
            });
        }
        let cols: Vec<Vec<C64>> = (0..b.cols()).map(|j| self.solve_vec(&b.column_vec(j))).collect();
        Ok(Matrix::from_columns(self.n, &cols))
    }
}

/// Solves `a x = b` for square `a`.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    Lu::factor(a)?.solve(b)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    Lu::factor(a)?.solve(&Matrix::identity(n))
}

/// Cholesky factor `L` with `a = L L*`, or `None` if `a` is not numerically
/// Hermitian positive definite.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    if !a.is_square() {
        return None;
    }
    let n = a.rows();
    let scale = (0..n).map(|i| a.get(i, i).re.abs()).fold(0.0, f64::max);
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if !(d > n as f64 * UNIT_ROUNDOFF * scale) {
            return None;
        }
        let ljj = d.sqrt();
        l.set(j, j, C64::new(ljj, 0.0));
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / ljj);
        }
    }
    Some(l)
}

fn cholesky_solve_with(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.rows();
    let cols: Vec<Vec<C64>> = (0..b.cols())
        .map(|c| {
            let mut y = b.column_vec(c);
            for i in 0..n {
                let mut s = y[i];
                for k in 0..i {
                    s -= l.get(i, k) * y[k];
                }
                y[i] = s / l.get(i, i);
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in (i + 1)..n {
                    s -= l.get(k, i).conj() * y[k];
                }
                y[i] = s / l.get(i, i);
            }
            y
        })
        .collect();
    Matrix::from_columns(n, &cols)
}

/// Solves `h x = b` for Hermitian `h`: Cholesky first, LU when the Cholesky
/// factorization breaks down.
pub fn hermitian_solve(h: &Matrix, b: &Matrix) -> Result<Matrix> {
    if b.rows() != h.rows() {
        return Err(Error::DimensionMismatch {
            context: "Hermitian solve",
            expected: format!("{} rows", h.rows()),
            found: format!("{} rows", b.rows()),
        });
    }
    match cholesky(h) {
        Some(l) => Ok(cholesky_solve_with(&l, b)),
        None => solve(h, b),
    }
}

/// Orthonormalizes `vectors` with two passes of modified Gram-Schmidt,
/// dropping vectors whose remainder falls below `drop_tol` relative to their
/// original norm.
pub fn orthonormalize(vectors: &[Vec<C64>], drop_tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let norm0 = vec_norm(v);
        if norm0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = vec_dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let norm = vec_norm(&w);
        if norm > drop_tol * norm0 {
            basis.push(w.iter().map(|z| z / norm).collect());
        }
    }
    basis
}

/// Extends an orthonormal set in C^dim to an orthonormal basis of C^dim
/// using standard basis vectors as candidates.
pub fn complete_basis(mut basis: Vec<Vec<C64>>, dim: usize) -> Vec<Vec<C64>> {
    let mut e = 0;
    while basis.len() < dim && e < dim {
        let mut w = vec![ZERO; dim];
        w[e] = ONE;
        e += 1;
        for _ in 0..2 {
            for q in &basis {
                let c = vec_dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let norm = vec_norm(&w);
        if norm > 0.5 / (dim as f64).sqrt() {
            basis.push(w.iter().map(|z| z / norm).collect());
        }
    }
    basis
}

/// Hermitian part `(h + h*) / 2`.
pub fn hermitian_part(h: &Matrix) -> Matrix {
    (h + &h.adjoint()).scale_real(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_and_inverts() {
        let a = Matrix::from_real_rows(&[[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]]);
        let inv = inverse(&a).unwrap();
        assert!((&a * &inv).distance(&Matrix::identity(3)) < 1e-14);
    }

    #[test]
    fn lu_detects_singular() {
        let a = Matrix::from_real_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(inverse(&a), Err(Error::Singular { .. })));
    }

    #[test]
    fn cholesky_positive_definite_only() {
        let h = Matrix::from_real_rows(&[[4.0, 2.0], [2.0, 3.0]]);
        let l = cholesky(&h).unwrap();
        assert!((&l * &l.adjoint()).distance(&h) < 1e-14);
        assert!(cholesky(&Matrix::from_real_rows(&[[1.0, 2.0], [2.0, 1.0]])).is_none());
        // indefinite but invertible falls back to LU
        let x = hermitian_solve(&Matrix::from_real_rows(&[[1.0, 2.0], [2.0, 1.0]]), &Matrix::identity(2)).unwrap();
        assert!((x.get(0, 0).re + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn basis_completion_is_orthonormal() {
        let v = vec![vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)]];
        let q = complete_basis(orthonormalize(&v, 1e-12), 3);
        assert_eq!(q.len(), 3);
        let m = Matrix::from_columns(3, &q);
        assert!((&m.adjoint() * &m).distance(&Matrix::identity(3)) < 1e-14);
    }
}
