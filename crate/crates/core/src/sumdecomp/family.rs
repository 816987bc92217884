use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_solve, Lu};
use crate::matrix::{Matrix, C64};
use crate::oracle::{pinv_oracle, projectors};
use crate::random::{random_unitary, seeded_rng, uniform};
use crate::svd::svd;
use crate::tolerance::Tolerance;
use crate::verify::ResidualReport;

/// A nonempty ordered family of equally shaped matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    members: Vec<Matrix>,
}

impl OperatorFamily {
    pub fn new(members: Vec<Matrix>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::InvalidParameter("family must have at least one member".into()))?;
        let shape = first.shape();
        if let Some(bad) = members.iter().find(|m| m.shape() != shape) {
            return Err(Error::DimensionMismatch {
                context: "operator family",
                expected: format!("{}x{}", shape.0, shape.1),
                found: format!("{}x{}", bad.rows(), bad.cols()),
            });
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[Matrix] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> (usize, usize) {
        self.members[0].shape()
    }

    pub fn get(&self, k: usize) -> Result<&Matrix> {
        self.members.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            len: self.members.len(),
        })
    }

    pub fn sum(&self) -> Matrix {
        Matrix::sum_all(&self.members).expect("family is nonempty")
    }

    fn sum_except(&self, skip: usize) -> Matrix {
        let (m, n) = self.shape();
        self.members
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != skip)
            .fold(Matrix::zeros(m, n), |acc, (_, a)| &acc + a)
    }
}

/// Pairwise orthogonality of ranges and coranges: `A_j* A_k = 0` and
/// `A_j A_k* = 0` for every `j != k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalityCertificate {
    pub pairwise_left: f64,
    pub pairwise_right: f64,
    pub threshold: f64,
    pub holds: bool,
    /// Pair with the largest product norm, if any pair exists.
    pub worst_pair: Option<(usize, usize)>,
}

pub fn check_orthogonality(fam: &OperatorFamily, tol: &Tolerance) -> OrthogonalityCertificate {
    let members = fam.members();
    let scale = members
        .iter()
        .map(|a| a.frobenius_norm().powi(2))
        .fold(1.0, f64::max);
    let threshold = tol.residual_abs * scale;
    let (mut left, mut right) = (0.0f64, 0.0f64);
    let mut worst: Option<((usize, usize), f64)> = None;
    for j in 0..members.len() {
        for k in 0..members.len() {
            if j == k {
                continue;
            }
            let l = (&members[j].adjoint() * &members[k]).frobenius_norm();
            let r = (&members[j] * &members[k].adjoint()).frobenius_norm();
            left = left.max(l);
            right = right.max(r);
            let w = l.max(r);
            if worst.is_none_or(|(_, best)| w > best) {
                worst = Some(((j.min(k), j.max(k)), w));
            }
        }
    }
    OrthogonalityCertificate {
        pairwise_left: left,
        pairwise_right: right,
        threshold,
        holds: left <= threshold && right <= threshold,
        worst_pair: worst.map(|(p, _)| p),
    }
}

fn require_certificate(fam: &OperatorFamily, tol: &Tolerance) -> Result<()> {
    let cert = check_orthogonality(fam, tol);
    if cert.holds {
        return Ok(());
    }
    let (first, second) = cert.worst_pair.unwrap_or((0, 0));
    Err(Error::NotOrthogonal {
        first,
        second,
        residual: cert.pairwise_left.max(cert.pairwise_right),
    })
}

#[derive(Debug, Clone)]
pub struct SumPinv {
    /// `∑ A_k†`.
    pub pinv: Matrix,
    pub terms: Vec<Matrix>,
}

/// Pseudoinverse of the sum of a certified family as the sum of the
/// members' pseudoinverses.
pub fn pinv_sum(fam: &OperatorFamily, tol: &Tolerance) -> Result<SumPinv> {
    require_certificate(fam, tol)?;
    let terms = fam
        .members()
        .iter()
        .map(|a| pinv_oracle(a, tol))
        .collect::<Result<Vec<_>>>()?;
    let pinv = Matrix::sum_all(&terms).expect("family is nonempty");
    Ok(SumPinv { pinv, terms })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramSide {
    /// `(∑ A_k* A_k)† A_k0*`
    Left,
    /// `A_k0* (∑ A_k A_k*)†`
    Right,
}

/// Pseudoinverse of one member from the Gram matrix of the whole family.
/// `k0` is zero-based.
pub fn pinv_via_gram_equation(fam: &OperatorFamily, k0: usize, side: GramSide, tol: &Tolerance) -> Result<Matrix> {
    require_certificate(fam, tol)?;
    let a0 = fam.get(k0)?;
    let (m, n) = fam.shape();
    let rank = svd(&fam.sum(), tol)?.rank;
    match side {
        GramSide::Left => {
            let g = Matrix::sum_all(&fam.members().iter().map(|a| &a.adjoint() * a).collect::<Vec<_>>()).expect("nonempty");
            if rank == n {
                if let Ok(x) = hermitian_solve(&g, &a0.adjoint()) {
                    return Ok(x);
                }
            }
            Ok(&pinv_oracle(&g, tol)? * &a0.adjoint())
        }
        GramSide::Right => {
            let h = Matrix::sum_all(&fam.members().iter().map(|a| a * &a.adjoint()).collect::<Vec<_>>()).expect("nonempty");
            if rank == m {
                if let Ok(y) = hermitian_solve(&h, a0) {
                    return Ok(y.adjoint());
                }
            }
            Ok(&a0.adjoint() * &pinv_oracle(&h, tol)?)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectorEquationSolution {
    pub pinv: Matrix,
    /// Residual of the dual equation `X (∑ A_k) = P_{N(∑_{k≠k0} A_k)}`.
    pub residuals: ResidualReport,
}

/// Solves `(∑ A_k) X = P_{N(∑_{k≠k0} A_k*)}` for an invertible sum.
/// `k0` is zero-based.
pub fn pinv_invertible_projector_eq(fam: &OperatorFamily, k0: usize, tol: &Tolerance) -> Result<ProjectorEquationSolution> {
    require_certificate(fam, tol)?;
    fam.get(k0)?;
    let s = fam.sum();
    if !s.is_square() {
        return Err(Error::DimensionMismatch {
            context: "invertible family sum",
            expected: "square members".into(),
            found: format!("{}x{}", s.rows(), s.cols()),
        });
    }
    let lu = Lu::factor(&s)?;
    if svd(&s, tol)?.rank < s.rows() {
        return Err(Error::Singular {
            context: "family sum is rank deficient",
        });
    }
    let rest = projectors(&fam.sum_except(k0), tol)?;
    let x = lu.solve(&rest.left_null)?;
    let mut residuals = ResidualReport::new(tol.residual_abs);
    residuals.push("primal_projector_eq", (&s * &x).distance(&rest.left_null));
    residuals.push("dual_projector_eq", (&x * &s).distance(&rest.null));
    Ok(ProjectorEquationSolution { pinv: x, residuals })
}

/// Family `A_k = U E_k V*` with shared random unitaries and disjoint
/// diagonal index blocks of sizes `ranks`, so every pair is orthogonal.
pub fn gen_svd_block_family(seed: u64, rows: usize, cols: usize, ranks: &[usize]) -> Result<OperatorFamily> {
    if ranks.is_empty() {
        return Err(Error::InvalidParameter("at least one rank is required".into()));
    }
    let budget = rows.min(cols);
    let total: usize = ranks.iter().sum();
    if total > budget {
        return Err(Error::InvalidParameter(format!(
            "rank budget exceeded: sum of ranks {total} > min(rows, cols) = {budget}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let u = random_unitary(&mut rng, rows);
    let v = random_unitary(&mut rng, cols);
    let mut offset = 0;
    let mut members = Vec::with_capacity(ranks.len());
    for &r in ranks {
        let mut diag = vec![C64::new(0.0, 0.0); budget];
        for d in diag.iter_mut().skip(offset).take(r) {
            *d = C64::new(uniform(&mut rng, 0.5, 2.0), 0.0);
        }
        offset += r;
        members.push(from_singular_diagonal(&u, &diag, &v));
    }
    OperatorFamily::new(members)
}

/// Three matrices `U (s α) V*`, `U (s β) V*`, `U (s γ) V*` sharing all
/// singular subspaces, with `α = β = -γ = alpha` and random positive `s`.
/// Their sum's pseudoinverse is the sum of pseudoinverses although no pair
/// is orthogonal.
pub fn gen_shared_subspace_triple(seed: u64, rows: usize, cols: usize, rank: usize, alpha: C64) -> Result<[Matrix; 3]> {
    let budget = rows.min(cols);
    if rank == 0 || rank > budget || alpha == C64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= rank <= {budget} and nonzero alpha"
        )));
    }
    let mut rng = seeded_rng(seed);
    let u = random_unitary(&mut rng, rows);
    let v = random_unitary(&mut rng, cols);
    let s: Vec<f64> = (0..budget)
        .map(|i| if i < rank { uniform(&mut rng, 0.5, 2.0) } else { 0.0 })
        .collect();
    let build = |w: C64| {
        let diag: Vec<C64> = s.iter().map(|&x| w * x).collect();
        from_singular_diagonal(&u, &diag, &v)
    };
    Ok([build(alpha), build(alpha), build(-alpha)])
}

fn from_singular_diagonal(u: &Matrix, diag: &[C64], v: &Matrix) -> Matrix {
    Matrix::from_fn(u.rows(), v.rows(), |i, j| {
        diag.iter()
            .enumerate()
            .map(|(k, &d)| u.get(i, k) * d * v.get(j, k).conj())
            .sum()
    })
}

/// Projector onto `⋂ N(A_k)`, from the stacked matrix.
pub fn common_null_projector(fam: &OperatorFamily, tol: &Tolerance) -> Result<Matrix> {
    let stacked = fam.members()[1..]
        .iter()
        .fold(fam.members()[0].clone(), |acc, a| acc.vstack(a));
    Ok(projectors(&stacked, tol)?.null)
}
