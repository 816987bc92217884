use crate::error::{Error, Result};
use crate::linalg::{hermitian_solve, inverse};
use crate::matrix::{vec_dot, Matrix, C64};
use crate::oracle::{pinv_oracle, projectors};
use crate::svd::svd;
use crate::tolerance::Tolerance;
use crate::verify::ResidualReport;

/// Dyads `d_k g_k f_k*` that complete `A` towards full rank.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionData {
    /// Orthonormal vectors in `N(A)`.
    pub f_basis: Vec<Vec<C64>>,
    /// Orthonormal vectors in `N(A*)`.
    pub g_basis: Vec<Vec<C64>>,
    pub d: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Completion {
    /// Null-space bases from the SVD, every weight equal to `σ₁(A)`.
    Auto,
    Given(CompletionData),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletionPath {
    /// Square and fully completed: one ordinary inverse.
    SquareInverse,
    /// Completed matrix injective: normal equations on the columns.
    Injective,
    /// Completed matrix surjective: normal equations on the rows.
    Surjective,
    /// Partial completion: pseudoinverse of the completed matrix.
    Oracle,
}

#[derive(Debug, Clone)]
pub struct CompletionResult {
    pub pinv: Matrix,
    pub path: CompletionPath,
}

fn orthonormality_defect(vs: &[Vec<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, x) in vs.iter().enumerate() {
        for (j, y) in vs.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((vec_dot(x, y) - target).norm());
        }
    }
    worst
}

impl CompletionData {
    pub fn validate(&self, a: &Matrix, tol: &Tolerance) -> Result<()> {
        let (m, n) = a.shape();
        let p = self.d.len();
        if self.f_basis.len() != p || self.g_basis.len() != p {
            return Err(Error::InvalidCompletion(format!(
                "{} f vectors, {} g vectors and {} weights must agree",
                self.f_basis.len(),
                self.g_basis.len(),
                p
            )));
        }
        if self.f_basis.iter().any(|f| f.len() != n) || self.g_basis.iter().any(|g| g.len() != m) {
            return Err(Error::InvalidCompletion(format!(
                "f vectors need length {n} and g vectors length {m}"
            )));
        }
        if let Some(k) = self.d.iter().position(|d| *d == C64::new(0.0, 0.0) || !d.is_finite()) {
            return Err(Error::InvalidCompletion(format!("weight d[{k}] must be finite and nonzero")));
        }
        let limit = tol.residual_abs.max(1e-12);
        let df = orthonormality_defect(&self.f_basis);
        if df > limit {
            return Err(Error::InvalidCompletion(format!("f basis is not orthonormal (defect {df:.3e})")));
        }
        let dg = orthonormality_defect(&self.g_basis);
        if dg > limit {
            return Err(Error::InvalidCompletion(format!("g basis is not orthonormal (defect {dg:.3e})")));
        }
        let scale = tol.residual_abs * a.frobenius_norm().max(1.0);
        let ah = a.adjoint();
        for (k, f) in self.f_basis.iter().enumerate() {
            let r = crate::matrix::vec_norm(&a.mul_vec(f));
            if r > scale {
                return Err(Error::InvalidCompletion(format!("A f[{k}] = {r:.3e}, f[{k}] is not in N(A)")));
            }
        }
        for (k, g) in self.g_basis.iter().enumerate() {
            let r = crate::matrix::vec_norm(&ah.mul_vec(g));
            if r > scale {
                return Err(Error::InvalidCompletion(format!("A* g[{k}] = {r:.3e}, g[{k}] is not in N(A*)")));
            }
        }
        Ok(())
    }

    /// `∑ d_k g_k f_k*`, rows x cols.
    pub fn dyads(&self, rows: usize, cols: usize) -> Matrix {
        self.sum_of(rows, cols, |k| (self.d[k], &self.g_basis[k], &self.f_basis[k]))
    }

    /// `∑ (1/d_k) f_k g_k*`, cols x rows.
    pub fn inverse_dyads(&self, rows: usize, cols: usize) -> Matrix {
        self.sum_of(cols, rows, |k| (self.d[k].inv(), &self.f_basis[k], &self.g_basis[k]))
    }

    fn sum_of<'a>(&'a self, r: usize, c: usize, term: impl Fn(usize) -> (C64, &'a Vec<C64>, &'a Vec<C64>)) -> Matrix {
        (0..self.d.len()).fold(Matrix::zeros(r, c), |acc, k| {
            let (w, x, y) = term(k);
            &acc + &Matrix::outer(x, y).scale(w)
        })
    }
}

/// `A†` from the pseudoinverse (or inverse) of `A + ∑ d_k g_k f_k*` minus
/// `∑ (1/d_k) f_k g_k*`.
pub fn rank_completion_pinv(a: &Matrix, completion: &Completion, tol: &Tolerance) -> Result<CompletionResult> {
    let (m, n) = a.shape();
    let f = svd(a, tol)?;
    let data = match completion {
        Completion::Given(data) => {
            data.validate(a, tol)?;
            data.clone()
        }
        Completion::Auto => {
            let p = (n - f.rank).min(m - f.rank);
            let weight = if f.sigma_max() > 0.0 { f.sigma_max() } else { 1.0 };
            CompletionData {
                f_basis: f.null_basis().into_iter().take(p).collect(),
                g_basis: f.left_null_basis().into_iter().take(p).collect(),
                d: vec![C64::new(weight, 0.0); p],
            }
        }
    };
    let p = data.d.len();
    let correction = data.inverse_dyads(m, n);
    let completed = a + &data.dyads(m, n);

    let injective = f.rank + p == n;
    let surjective = f.rank + p == m;
    let (base, path) = if injective && surjective {
        (inverse(&completed)?, CompletionPath::SquareInverse)
    } else if injective {
        // A*A + ∑ |d_k|² f_k f_k*, the Gram matrix of the completed matrix.
        let gram = (0..p).fold(&a.adjoint() * a, |acc, k| {
            &acc + &Matrix::outer(&data.f_basis[k], &data.f_basis[k]).scale_real(data.d[k].norm_sqr())
        });
        (hermitian_solve(&gram, &completed.adjoint())?, CompletionPath::Injective)
    } else if surjective {
        let gram = (0..p).fold(a * &a.adjoint(), |acc, k| {
            &acc + &Matrix::outer(&data.g_basis[k], &data.g_basis[k]).scale_real(data.d[k].norm_sqr())
        });
        (hermitian_solve(&gram, &completed)?.adjoint(), CompletionPath::Surjective)
    } else {
        (pinv_oracle(&completed, tol)?, CompletionPath::Oracle)
    };
    Ok(CompletionResult {
        pinv: &base - &correction,
        path,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    /// `(A*A + B*B) X = A*`, or the mirrored row form.
    Gram,
    /// `X = (A+B)⁻¹ − B†`.
    Invertible,
}

#[derive(Debug, Clone)]
pub struct PairResult {
    pub pinv: Matrix,
    /// Projector-equation residuals, filled in invertible mode.
    pub residuals: ResidualReport,
}

struct PairGeometry {
    a_kills_corange_b: f64,
    b_range_in_left_null_a: f64,
    a_star_kills_range_b: f64,
    b_corange_in_null_a: f64,
    rank_a: usize,
    rank_b: usize,
    threshold: f64,
}

impl PairGeometry {
    fn measure(a: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<Self> {
        let pa = projectors(a, tol)?;
        let pb = projectors(b, tol)?;
        let rank_a = svd(a, tol)?.rank;
        let rank_b = svd(b, tol)?.rank;
        let norm_a = a.frobenius_norm().max(1.0);
        Ok(Self {
            // R(B*) ⊆ N(A)
            a_kills_corange_b: if a.cols() == b.cols() { (a * &pb.corange).frobenius_norm() / norm_a } else { f64::INFINITY },
            // R(B) ⊆ N(A*)
            b_range_in_left_null_a: if a.rows() == b.rows() { (&pa.range * &pb.range).frobenius_norm() } else { f64::INFINITY },
            // R(B) ⊆ N(A*) expressed through A*
            a_star_kills_range_b: if a.rows() == b.rows() { (&a.adjoint() * &pb.range).frobenius_norm() / norm_a } else { f64::INFINITY },
            // R(B*) ⊆ N(A) expressed through projectors
            b_corange_in_null_a: if a.cols() == b.cols() { (&pa.corange * &pb.corange).frobenius_norm() } else { f64::INFINITY },
            rank_a,
            rank_b,
            threshold: tol.residual_abs,
        })
    }

    fn corange_b_equals_null_a(&self, cols: usize) -> std::result::Result<(), String> {
        if self.a_kills_corange_b.max(self.b_corange_in_null_a) > self.threshold {
            return Err(format!(
                "R(B*) is not contained in N(A) (residual {:.3e})",
                self.a_kills_corange_b.max(self.b_corange_in_null_a)
            ));
        }
        if self.rank_a + self.rank_b != cols {
            return Err(format!(
                "R(B*) does not exhaust N(A): rank(A) + rank(B) = {} + {} != {cols}",
                self.rank_a, self.rank_b
            ));
        }
        Ok(())
    }

    fn range_b_equals_left_null_a(&self, rows: usize) -> std::result::Result<(), String> {
        self.range_b_in_left_null_a()?;
        if self.rank_a + self.rank_b != rows {
            return Err(format!(
                "R(B) does not exhaust N(A*): rank(A) + rank(B) = {} + {} != {rows}",
                self.rank_a, self.rank_b
            ));
        }
        Ok(())
    }

    fn range_b_in_left_null_a(&self) -> std::result::Result<(), String> {
        let r = self.a_star_kills_range_b.max(self.b_range_in_left_null_a);
        if r > self.threshold {
            return Err(format!("R(B) is not contained in N(A*) (residual {r:.3e})"));
        }
        Ok(())
    }

    fn corange_b_in_null_a(&self) -> std::result::Result<(), String> {
        let r = self.a_kills_corange_b.max(self.b_corange_in_null_a);
        if r > self.threshold {
            return Err(format!("R(B*) is not contained in N(A) (residual {r:.3e})"));
        }
        Ok(())
    }
}

/// `A†` from a complementary matrix `B` whose row space (or column space)
/// fills the null space of `A` (or of `A*`).
pub fn completion_pinv_pair(a: &Matrix, b: &Matrix, mode: PairMode, tol: &Tolerance) -> Result<PairResult> {
    let (m, n) = a.shape();
    let geo = PairGeometry::measure(a, b, tol)?;
    let mut residuals = ResidualReport::new(tol.residual_abs);
    match mode {
        PairMode::Gram => {
            let left = if b.cols() == n { geo.corange_b_equals_null_a(n) } else { Err("B must have as many columns as A".into()) };
            let right = if b.rows() == m { geo.range_b_equals_left_null_a(m) } else { Err("B must have as many rows as A".into()) };
            let ah = a.adjoint();
            match (left, right) {
                (Ok(()), _) => {
                    let gram = &(&ah * a) + &(&b.adjoint() * b);
                    Ok(PairResult {
                        pinv: hermitian_solve(&gram, &ah)?,
                        residuals,
                    })
                }
                (_, Ok(())) => {
                    let gram = &(a * &ah) + &(b * &b.adjoint());
                    Ok(PairResult {
                        pinv: hermitian_solve(&gram, a)?.adjoint(),
                        residuals,
                    })
                }
                (Err(l), Err(r)) => Err(Error::SubspaceCondition(format!("{l}; mirrored form: {r}"))),
            }
        }
        PairMode::Invertible => {
            if !a.is_square() || b.shape() != a.shape() {
                return Err(Error::DimensionMismatch {
                    context: "invertible pair completion",
                    expected: format!("square A and B of equal shape ({m}x{m})"),
                    found: format!("A {m}x{n}, B {}x{}", b.rows(), b.cols()),
                });
            }
            let direct = geo.corange_b_equals_null_a(n).and_then(|_| geo.range_b_in_left_null_a());
            let mirrored = geo.range_b_equals_left_null_a(m).and_then(|_| geo.corange_b_in_null_a());
            if let (Err(l), Err(r)) = (&direct, &mirrored) {
                return Err(Error::SubspaceCondition(format!("{l}; mirrored form: {r}")));
            }
            let s = a + b;
            let x = &inverse(&s)? - &pinv_oracle(b, tol)?;
            let pb = projectors(b, tol)?;
            residuals.push("primal_projector_eq", (&s * &x).distance(&pb.left_null));
            residuals.push("dual_projector_eq", (&x * &s).distance(&pb.null));
            Ok(PairResult { pinv: x, residuals })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_unitary, seeded_rng};
    use crate::verify::penrose_residuals;

    fn circ3(c: [f64; 3]) -> Matrix {
        Matrix::from_fn(3, 3, |i, j| C64::new(c[(j + 3 - i) % 3], 0.0))
    }

    fn unit(n: usize, k: usize) -> Vec<C64> {
        (0..n).map(|i| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn diagonal_completion() {
        let tol = Tolerance::default();
        let data = CompletionData {
            f_basis: vec![unit(2, 1)],
            g_basis: vec![unit(2, 1)],
            d: vec![C64::new(1.0, 0.0)],
        };
        let r = rank_completion_pinv(&Matrix::diag_real(&[1.0, 0.0]), &Completion::Given(data), &tol).unwrap();
        assert_eq!(r.path, CompletionPath::SquareInverse);
        assert!(r.pinv.distance(&Matrix::diag_real(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn circulant_completion() {
        let tol = Tolerance::default();
        let e = vec![C64::new(1.0 / 3f64.sqrt(), 0.0); 3];
        let data = CompletionData {
            f_basis: vec![e.clone()],
            g_basis: vec![e],
            d: vec![C64::new(1.0, 0.0)],
        };
        let a = circ3([1.0, -1.0, 0.0]);
        let r = rank_completion_pinv(&a, &Completion::Given(data), &tol).unwrap();
        assert!(r.pinv.distance(&circ3([1.0 / 3.0, 0.0, -1.0 / 3.0])) < 1e-14);
    }

    #[test]
    fn auto_mode_matches_oracle() {
        let tol = Tolerance::default();
        let mut rng = seeded_rng(21);
        let a = &random_matrix(&mut rng, 6, 4) * &random_matrix(&mut rng, 4, 6);
        let r = rank_completion_pinv(&a, &Completion::Auto, &tol).unwrap();
        assert_eq!(r.path, CompletionPath::SquareInverse);
        assert!(r.pinv.distance(&pinv_oracle(&a, &tol).unwrap()) < 1e-9);
    }

    #[test]
    fn rectangular_paths() {
        let tol = Tolerance::default();
        let mut rng = seeded_rng(8);
        for &(m, n, r) in &[(7, 4, 2), (4, 7, 2), (6, 6, 6), (5, 3, 3)] {
            let a = &random_matrix(&mut rng, m, r) * &random_matrix(&mut rng, r, n);
            let res = rank_completion_pinv(&a, &Completion::Auto, &tol).unwrap();
            let want = pinv_oracle(&a, &tol).unwrap();
            assert!(res.pinv.distance(&want) < 1e-9 * want.frobenius_norm().max(1.0), "{m}x{n}");
            let expected = if m > n { CompletionPath::Injective } else if m < n { CompletionPath::Surjective } else { CompletionPath::SquareInverse };
            assert_eq!(res.path, expected);
        }
    }

    #[test]
    fn partial_completion_uses_oracle() {
        let tol = Tolerance::default();
        let a = Matrix::diag_real(&[2.0, 0.0, 0.0]);
        let data = CompletionData {
            f_basis: vec![unit(3, 2)],
            g_basis: vec![unit(3, 1)],
            d: vec![C64::new(0.0, 3.0)],
        };
        let r = rank_completion_pinv(&a, &Completion::Given(data), &tol).unwrap();
        assert_eq!(r.path, CompletionPath::Oracle);
        assert!(r.pinv.distance(&Matrix::diag_real(&[0.5, 0.0, 0.0])) < 1e-15);
    }

    #[test]
    fn invalid_completion_rejected() {
        let tol = Tolerance::default();
        let a = Matrix::diag_real(&[1.0, 0.0]);
        let bad_space = CompletionData {
            f_basis: vec![unit(2, 0)],
            g_basis: vec![unit(2, 1)],
            d: vec![C64::new(1.0, 0.0)],
        };
        assert!(matches!(rank_completion_pinv(&a, &Completion::Given(bad_space), &tol), Err(Error::InvalidCompletion(_))));
        let zero_weight = CompletionData {
            f_basis: vec![unit(2, 1)],
            g_basis: vec![unit(2, 1)],
            d: vec![C64::new(0.0, 0.0)],
        };
        assert!(rank_completion_pinv(&a, &Completion::Given(zero_weight), &tol).is_err());
        let not_unit = CompletionData {
            f_basis: vec![vec![C64::new(0.0, 0.0), C64::new(2.0, 0.0)]],
            g_basis: vec![unit(2, 1)],
            d: vec![C64::new(1.0, 0.0)],
        };
        assert!(rank_completion_pinv(&a, &Completion::Given(not_unit), &tol).is_err());
    }

    #[test]
    fn complex_weights_and_rotated_bases_agree() {
        let tol = Tolerance::default();
        let mut rng = seeded_rng(30);
        let a = &random_matrix(&mut rng, 5, 3) * &random_matrix(&mut rng, 3, 5);
        let f = svd(&a, &tol).unwrap();
        let q = random_unitary(&mut rng, 2);
        let rotate = |basis: Vec<Vec<C64>>| -> Vec<Vec<C64>> {
            (0..2)
                .map(|j| (0..5).map(|i| basis[0][i] * q.get(0, j) + basis[1][i] * q.get(1, j)).collect())
                .collect()
        };
        let data = CompletionData {
            f_basis: rotate(f.null_basis()),
            g_basis: f.left_null_basis(),
            d: vec![C64::new(0.3, 2.0), C64::new(-4.0, 0.5)],
        };
        let r = rank_completion_pinv(&a, &Completion::Given(data), &tol).unwrap();
        assert!(r.pinv.distance(&pinv_oracle(&a, &tol).unwrap()) < 1e-8);
    }

    #[test]
    fn pair_examples() {
        let tol = Tolerance::default();
        let a = Matrix::diag_real(&[1.0, 0.0]);
        let b = Matrix::diag_real(&[0.0, 3.0]);
        for mode in [PairMode::Gram, PairMode::Invertible] {
            let r = completion_pinv_pair(&a, &b, mode, &tol).unwrap();
            assert!(r.pinv.distance(&a) < 1e-15);
            assert!(r.residuals.all_pass());
        }
        let d = Matrix::from_real_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, -1.0], [0.0, -1.0, 0.0]]);
        let tau = [1.0, 0.0, 1.0];
        let r = completion_pinv_pair(&d, &Matrix::outer_real(&tau, &tau), PairMode::Gram, &tol).unwrap();
        assert!(r.pinv.distance(&d.scale_real(0.5)) < 1e-14);
        let c = circ3([1.0, -1.0, 0.0]);
        let e = [1.0; 3];
        for mode in [PairMode::Gram, PairMode::Invertible] {
            let r = completion_pinv_pair(&c, &Matrix::outer_real(&e, &e), mode, &tol).unwrap();
            assert!(r.pinv.distance(&circ3([1.0 / 3.0, 0.0, -1.0 / 3.0])) < 1e-14);
            assert!(penrose_residuals(&c, &r.pinv, &tol).unwrap().all_pass());
        }
    }

    #[test]
    fn pair_conditions_named() {
        let tol = Tolerance::default();
        let a = Matrix::diag_real(&[1.0, 0.0, 0.0]);
        let err = completion_pinv_pair(&a, &Matrix::diag_real(&[0.0, 1.0, 0.0]), PairMode::Gram, &tol).unwrap_err();
        match err {
            Error::SubspaceCondition(msg) => assert!(msg.contains("exhaust"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let err = completion_pinv_pair(&a, &Matrix::diag_real(&[1.0, 1.0, 1.0]), PairMode::Invertible, &tol).unwrap_err();
        assert!(matches!(err, Error::SubspaceCondition(m) if m.contains("not contained")));
    }
}
