use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{inverse, Lu};
use crate::matrix::{Matrix, C64};
use crate::random::uniform;
use crate::tolerance::Tolerance;
use crate::verify::{penrose_residuals, ResidualReport};

/// Weighted tree on vertices `1..=n`; edges are `(i, j, w)` with 1-based
/// endpoints and nonzero real weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTree {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedTree {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::NotATree(format!("need at least 2 vertices, got {n}")));
        }
        if edges.len() != n - 1 {
            return Err(Error::NotATree(format!("{} edges for {n} vertices", edges.len())));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j, w) in &edges {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::NotATree(format!("edge ({i}, {j}) outside 1..={n}")));
            }
            if !w.is_finite() || w == 0.0 {
                return Err(Error::NotATree(format!("edge ({i}, {j}) has weight {w}")));
            }
            let (ri, rj) = (find(&mut parent, i - 1), find(&mut parent, j - 1));
            if ri == rj {
                return Err(Error::NotATree(format!("edge ({i}, {j}) closes a cycle")));
            }
            parent[ri] = rj;
        }
        // n - 1 edges without a cycle always connect n vertices.
        Ok(Self { n, edges })
    }

    /// Builds a tree from an edge list, inferring `n` as the largest label.
    pub fn from_edges(edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = edges.iter().map(|&(i, j, _)| i.max(j)).max().unwrap_or(0);
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn weight_sum(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Weight sum zero up to `1e-12 · max(1, ∑|w|)`.
    pub fn is_zero_sum(&self) -> bool {
        let scale = self.edges.iter().map(|e| e.2.abs()).sum::<f64>().max(1.0);
        self.weight_sum().abs() <= 1e-12 * scale
    }
}

/// Distance matrix, Laplacian, degrees and `τ = 2e − δ` of a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeMatrices {
    pub d: Matrix,
    pub l: Matrix,
    pub delta: Vec<f64>,
    pub tau: Vec<f64>,
    pub zero_sum: bool,
}

impl TreeMatrices {
    pub fn n(&self) -> usize {
        self.tau.len()
    }

    pub fn tau_complex(&self) -> Vec<C64> {
        self.tau.iter().map(|&t| C64::new(t, 0.0)).collect()
    }

    pub fn tau_norm_sq(&self) -> f64 {
        self.tau.iter().map(|t| t * t).sum()
    }

    /// `τᵗ L τ`.
    pub fn tau_l_tau(&self) -> f64 {
        let lt = self.l.mul_vec_real(&self.tau);
        self.tau.iter().zip(&lt).map(|(t, x)| t * x.re).sum()
    }

    /// `max |DL − (eτᵗ − 2I)|`.
    pub fn dl_identity_residual(&self) -> f64 {
        let n = self.n();
        let dl = &self.d * &self.l;
        let want = Matrix::from_fn(n, n, |i, j| C64::new(self.tau[j] - if i == j { 2.0 } else { 0.0 }, 0.0));
        dl.max_abs_diff(&want)
    }

    /// `max |Dτ|`.
    pub fn null_residual(&self) -> f64 {
        self.d.mul_vec_real(&self.tau).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

pub fn tree_build(tree: &WeightedTree) -> Result<TreeMatrices> {
    let n = tree.n;
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(i, j, w) in &tree.edges {
        adj[i - 1].push((j - 1, w));
        adj[j - 1].push((i - 1, w));
    }

    let mut d = Matrix::zeros(n, n);
    let mut dist = vec![0.0; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        seen.fill(false);
        seen[s] = true;
        dist[s] = 0.0;
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &(y, w) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    dist[y] = dist[x] + w;
                    queue.push_back(y);
                }
            }
        }
        for t in 0..n {
            d.set(s, t, C64::new(dist[t], 0.0));
        }
    }

    let mut l = Matrix::zeros(n, n);
    for &(i, j, w) in &tree.edges {
        let (i, j) = (i - 1, j - 1);
        let r = C64::new(1.0 / w, 0.0);
        l.set(i, j, -r);
        l.set(j, i, -r);
        l.set(i, i, l.get(i, i) + r);
        l.set(j, j, l.get(j, j) + r);
    }

    let delta: Vec<f64> = adj.iter().map(|a| a.len() as f64).collect();
    let tau = delta.iter().map(|g| 2.0 - g).collect();
    let tm = TreeMatrices {
        d,
        l,
        delta,
        tau,
        zero_sum: tree.is_zero_sum(),
    };

    if tm.zero_sum {
        let scale = tm.d.max_abs().max(1.0) * tm.l.max_abs().max(1.0) * n as f64;
        let bound = 1e-12 * scale;
        let dl = tm.dl_identity_residual();
        if dl > bound {
            return Err(Error::Invariant(format!("DL = eτᵗ − 2I fails by {dl:.3e}")));
        }
        let dt = tm.null_residual();
        if dt > bound {
            return Err(Error::Invariant(format!("Dτ = 0 fails by {dt:.3e}")));
        }
    }
    Ok(tm)
}

fn require_zero_sum(tree: &WeightedTree, tm: &TreeMatrices) -> Result<()> {
    if tm.zero_sum {
        Ok(())
    } else {
        Err(Error::NotZeroSum { sum: tree.weight_sum() })
    }
}

/// `2 / (τᵗLτ)` when that quantity is clearly nonzero, else 1.
pub fn auto_alpha(tm: &TreeMatrices) -> f64 {
    if closed_form_applies(tm) {
        2.0 / tm.tau_l_tau()
    } else {
        1.0
    }
}

fn closed_form_applies(tm: &TreeMatrices) -> bool {
    tm.tau_l_tau().abs() > 1e-8 * tm.l.frobenius_norm().max(1.0) * tm.tau_norm_sq()
}

/// `D + α ττᵗ`, invertible for zero-sum trees and `α ≠ 0`.
pub fn tree_completion(tm: &TreeMatrices, alpha: f64) -> Matrix {
    &tm.d + &Matrix::outer_real(&tm.tau, &tm.tau).scale_real(alpha)
}

#[derive(Debug, Clone)]
pub struct TreePinv {
    pub pinv: Matrix,
    pub alpha: f64,
    /// `(D + αττᵗ)⁻¹`, a {1,3,4}-inverse of `D`.
    pub witness: Matrix,
    /// Distance between the inverse-and-subtract and linear-solve results.
    pub path_gap: f64,
    pub report: ResidualReport,
}

/// `D† = (D + αττᵗ)⁻¹ − ττᵗ/(α‖τ‖⁴)`, cross-checked against the solve of
/// `(D + αττᵗ) X = I − ττᵗ/‖τ‖²`. `alpha = None` selects [`auto_alpha`].
pub fn tree_pinv(tree: &WeightedTree, tm: &TreeMatrices, alpha: Option<f64>, tol: &Tolerance) -> Result<TreePinv> {
    require_zero_sum(tree, tm)?;
    let alpha = match alpha {
        Some(a) if a == 0.0 || !a.is_finite() => {
            return Err(Error::InvalidParameter(format!("alpha must be finite and nonzero, got {a}")))
        }
        Some(a) => a,
        None => auto_alpha(tm),
    };
    let n = tm.n();
    let t2 = tm.tau_norm_sq();
    let ttt = Matrix::outer_real(&tm.tau, &tm.tau);
    let m = tree_completion(tm, alpha);

    let witness = inverse(&m)?;
    let by_inverse = &witness - &ttt.scale_real(1.0 / (alpha * t2 * t2));
    let rhs = &Matrix::identity(n) - &ttt.scale_real(1.0 / t2);
    let by_solve = Lu::factor(&m)?.solve(&rhs)?;

    let path_gap = by_inverse.distance(&by_solve);
    let scale = by_inverse.frobenius_norm().max(1.0);
    if path_gap > tol.residual_abs * scale {
        return Err(Error::Invariant(format!("tree pinv paths disagree by {path_gap:.3e}")));
    }
    let report = penrose_residuals(&tm.d, &by_inverse, &tol.scaled_for(&tm.d))?;
    Ok(TreePinv {
        pinv: by_inverse,
        alpha,
        witness,
        path_gap,
        report,
    })
}

/// Both `u` vectors built from `D†e`.
///
/// `u = ½(D†e + (eᵗD†e/4) τ)` and its Laplacian form are kept for
/// comparison, but the symmetric decomposition `D† = −L/2 + ûτᵗ + τûᵗ`
/// holds for `û = ½(D†e − (eᵗD†e/4) τ)`, with Laplacian form
/// `û = ½(Lτ/‖τ‖² − (τᵗLτ) τ/(2‖τ‖⁴))`. The two differ by a multiple of
/// `τ`, so `u` reconstructs `D†` only when `eᵗD†e = 0`.
#[derive(Debug, Clone)]
pub struct TreeU {
    /// `D†e` from one linear solve.
    pub dpinv_e: Vec<f64>,
    pub u: Vec<f64>,
    /// `½(Lτ/‖τ‖² − 3(τᵗLτ) τ/(2‖τ‖⁴))`, present when `τᵗLτ ≠ 0`.
    pub u_closed: Option<Vec<f64>>,
    pub u_hat: Vec<f64>,
    /// Laplacian form of `û`, present when `τᵗLτ ≠ 0`.
    pub u_hat_closed: Option<Vec<f64>>,
    /// `−L/2 + ûτᵗ + τûᵗ`.
    pub reconstruction: Matrix,
    /// Distance from the reconstruction to [`tree_pinv`]'s output.
    pub reconstruction_gap: f64,
    /// Same distance with `u` in place of `û`.
    pub u_reconstruction_gap: f64,
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn symmetric_rank_two(l: &Matrix, u: &[f64], tau: &[C64]) -> Matrix {
    let uc: Vec<C64> = u.iter().map(|&x| C64::new(x, 0.0)).collect();
    &(&l.scale_real(-0.5) + &Matrix::outer(&uc, tau)) + &Matrix::outer(tau, &uc)
}

pub fn tree_u_and_reconstruction(tree: &WeightedTree, tm: &TreeMatrices, tol: &Tolerance) -> Result<TreeU> {
    require_zero_sum(tree, tm)?;
    let alpha = auto_alpha(tm);
    let t2 = tm.tau_norm_sq();
    let m = tree_completion(tm, alpha);
    let rhs: Vec<C64> = tm.tau.iter().map(|t| C64::new(1.0 - 2.0 * t / t2, 0.0)).collect();
    let dpinv_e: Vec<f64> = Lu::factor(&m)?.solve_vec(&rhs).iter().map(|x| x.re).collect();

    let s = dpinv_e.iter().sum::<f64>() / 4.0;
    let u: Vec<f64> = dpinv_e.iter().zip(&tm.tau).map(|(x, t)| 0.5 * (x + s * t)).collect();
    let u_hat: Vec<f64> = dpinv_e.iter().zip(&tm.tau).map(|(x, t)| 0.5 * (x - s * t)).collect();

    let (u_closed, u_hat_closed) = if closed_form_applies(tm) {
        let lt: Vec<f64> = tm.l.mul_vec_real(&tm.tau).iter().map(|x| x.re).collect();
        let tlt = tm.tau_l_tau();
        let form = |coef: f64| -> Vec<f64> {
            let c = coef * tlt / (2.0 * t2 * t2);
            lt.iter().zip(&tm.tau).map(|(x, t)| 0.5 * (x / t2 - c * t)).collect()
        };
        let (uc, uhc) = (form(3.0), form(1.0));
        let scale = dpinv_e.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for (name, a, b) in [("u", &uc, &u), ("û", &uhc, &u_hat)] {
            let gap = max_gap(a, b);
            if gap > tol.residual_abs * scale {
                return Err(Error::Invariant(format!("{name} closed form disagrees by {gap:.3e}")));
            }
        }
        (Some(uc), Some(uhc))
    } else {
        (None, None)
    };

    let tc = tm.tau_complex();
    let reconstruction = symmetric_rank_two(&tm.l, &u_hat, &tc);
    let reference = tree_pinv(tree, tm, Some(alpha), tol)?;
    let reconstruction_gap = reconstruction.distance(&reference.pinv);
    if reconstruction_gap > tol.residual_abs * reference.pinv.frobenius_norm().max(1.0) {
        return Err(Error::Invariant(format!("reconstruction differs by {reconstruction_gap:.3e}")));
    }
    let u_reconstruction_gap = symmetric_rank_two(&tm.l, &u, &tc).distance(&reference.pinv);
    Ok(TreeU {
        dpinv_e,
        u,
        u_closed,
        u_hat,
        u_hat_closed,
        reconstruction,
        reconstruction_gap,
        u_reconstruction_gap,
    })
}

/// Random tree with zero weight sum: random attachment, shuffled labels,
/// `n − 2` weights from `±U[0.5, 2]` and a balancing last weight kept only
/// when its magnitude is at least 0.05.
pub fn gen_zero_sum_tree<R: Rng>(rng: &mut R, n: usize) -> Result<WeightedTree> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("zero-sum trees need n >= 3, got {n}")));
    }
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    let pairs: Vec<(usize, usize)> = (1..n).map(|k| (labels[rng.random_range(0..k)], labels[k])).collect();
    let weights = loop {
        let mut w: Vec<f64> = (0..n - 2)
            .map(|_| {
                let x = uniform(rng, 0.5, 2.0);
                if rng.random_bool(0.5) {
                    x
                } else {
                    -x
                }
            })
            .collect();
        let last = -w.iter().sum::<f64>();
        if last.abs() >= 0.05 {
            w.push(last);
            break w;
        }
    };
    let edges = pairs.into_iter().zip(weights).map(|((i, j), w)| (i, j, w)).collect();
    WeightedTree::new(n, edges)
}
