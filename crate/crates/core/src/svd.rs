//! One-sided Jacobi (Hestenes) singular value decomposition.
//!
//! The factorization is returned as `A = U Σ V*` with `U` unitary
//! `rows x rows` and `V` unitary `cols x cols`. Texts that write
//! `A = V Σ W*` use `V` for the left factor and `W` for the right one; here
//! those are `u` and `v` respectively.

use crate::error::{Error, Result};
use crate::matrix::{vec_dot, vec_norm, Matrix, C64, ONE, ZERO};
use crate::tolerance::{Tolerance, UNIT_ROUNDOFF};

/// Maximum number of Jacobi sweeps before giving up.
pub const SWEEP_BUDGET: usize = 100;

#[derive(Debug, Clone)]
pub struct SvdFactorization {
    pub u: Matrix,
    /// Non-increasing singular values, length `min(rows, cols)`.
    pub sigma: Vec<f64>,
    pub v: Matrix,
    /// Number of singular values strictly above the cutoff.
    pub rank: usize,
    pub cutoff: f64,
}

impl SvdFactorization {
    /// Left singular vectors spanning the range, as columns.
    pub fn range_basis(&self) -> Vec<Vec<C64>> {
        (0..self.rank).map(|j| self.u.column_vec(j)).collect()
    }

    /// Orthonormal basis of `N(A*)`.
    pub fn left_null_basis(&self) -> Vec<Vec<C64>> {
        (self.rank..self.u.cols()).map(|j| self.u.column_vec(j)).collect()
    }

    /// Right singular vectors spanning `R(A*)`.
    pub fn corange_basis(&self) -> Vec<Vec<C64>> {
        (0..self.rank).map(|j| self.v.column_vec(j)).collect()
    }

    /// Orthonormal basis of `N(A)`.
    pub fn null_basis(&self) -> Vec<Vec<C64>> {
        (self.rank..self.v.cols()).map(|j| self.v.column_vec(j)).collect()
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Reassembles `U Σ V*`.
    pub fn reconstruct(&self) -> Matrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        Matrix::from_fn(m, n, |i, j| {
            self.sigma
                .iter()
                .enumerate()
                .map(|(k, &s)| self.u.get(i, k) * s * self.v.get(j, k).conj())
                .sum()
        })
    }
}

/// Computes the SVD of `a`; numerical rank follows `tol.rank_cutoff`.
pub fn svd(a: &Matrix, tol: &Tolerance) -> Result<SvdFactorization> {
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.adjoint(), tol)?;
        return Ok(SvdFactorization {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
            rank: t.rank,
            cutoff: t.cutoff,
        });
    }

    let mut g: Vec<Vec<C64>> = (0..n).map(|j| a.column_vec(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            e
        })
        .collect();

    let norm_a = a.frobenius_norm();
    let negligible = (UNIT_ROUNDOFF * norm_a * 1e-3).powi(2);
    let rot_tol = UNIT_ROUNDOFF * m as f64;
    let mut converged = n < 2;
    for _ in 0..SWEEP_BUDGET {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = g[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = g[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = vec_dot(&g[p], &g[q]);
                let gabs = gamma.norm();
                if gabs <= rot_tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / gabs).conj();
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut g, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::SvdNoConvergence {
            budget: SWEEP_BUDGET,
        });
    }

    let mut order: Vec<(f64, usize)> = g.iter().enumerate().map(|(j, col)| (vec_norm(col), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    let sigma: Vec<f64> = order.iter().map(|&(s, _)| s).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff(sigma_max, m, n);
    let rank = sigma.iter().take_while(|&&s| s > cutoff).count();

    let u_candidates: Vec<Option<Vec<C64>>> = order
        .iter()
        .enumerate()
        .map(|(k, &(s, j))| (k < rank).then(|| g[j].iter().map(|z| z / s).collect()))
        .collect();
    let u_cols = orthonormal_in_order(u_candidates, m);
    let v_cols = orthonormal_in_order(order.iter().map(|&(_, j)| Some(v[j].clone())).collect(), n);

    Ok(SvdFactorization {
        u: Matrix::from_columns(m, &u_cols),
        sigma,
        v: Matrix::from_columns(n, &v_cols),
        rank,
        cutoff,
    })
}

fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let (left, right) = cols.split_at_mut(q);
    let (gp, gq) = (&mut left[p], &mut right[0]);
    for (x, y) in gp.iter_mut().zip(gq.iter_mut()) {
        let yp = *y * phase;
        let xp = *x;
        *x = xp * c - yp * s;
        *y = xp * s + yp * c;
    }
}

/// Orthonormalizes the given columns in order (two MGS passes each), filling
/// `None` slots and degenerate vectors from the standard basis, then extends
/// to `dim` columns.
fn orthonormal_in_order(candidates: Vec<Option<Vec<C64>>>, dim: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(dim);
    let mut next_unit = 0;
    let project_out = |w: &mut Vec<C64>, basis: &[Vec<C64>]| {
        for _ in 0..2 {
            for q in basis {
                let c = vec_dot(q, w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
    };
    let slots = candidates.len().max(dim);
    let mut iter = candidates.into_iter();
    for _ in 0..slots {
        if basis.len() == dim {
            break;
        }
        let mut accepted = false;
        if let Some(Some(mut w)) = iter.next() {
            project_out(&mut w, &basis);
            let norm = vec_norm(&w);
            if norm > 0.5 {
                basis.push(w.iter().map(|z| z / norm).collect());
                accepted = true;
            }
        }
        while !accepted && next_unit < dim {
            let mut w = vec![ZERO; dim];
            w[next_unit] = ONE;
            next_unit += 1;
            project_out(&mut w, &basis);
            let norm = vec_norm(&w);
            if norm > 0.5 / (dim as f64).sqrt() {
                basis.push(w.iter().map(|z| z / norm).collect());
                accepted = true;
            }
        }
    }
    basis
}
