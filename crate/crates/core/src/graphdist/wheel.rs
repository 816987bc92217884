use serde::Serialize;

use crate::circulant::{circ_materialize, circ_mul_exact};
use crate::error::{Error, Result};
use crate::linalg::hermitian_part;
use crate::matrix::{Matrix, C64};
use crate::svd::svd;
use crate::tolerance::Tolerance;
use crate::verify::{penrose_residuals, ResidualReport};

/// Wheel on `n` vertices (odd `n ≥ 5`): hub 0 joined to a cycle of
/// length `n − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WheelGraph {
    pub n: usize,
    /// `[[0, eᵗ], [e, circ(u)]]`.
    pub d: Matrix,
    /// Spans the null space of `d`.
    pub a: Vec<f64>,
    /// Cycle distance generator `(0, 1, 2, …, 2, 1)`.
    pub u: Vec<i128>,
    /// Alternating `(1, −1, …, 1, −1)`.
    pub v: Vec<i128>,
    /// `24 z`, exact.
    pub z24: Vec<i128>,
}

fn check_order(n: usize) -> Result<()> {
    if n < 5 || n.is_multiple_of(2) {
        Err(Error::InvalidWheel(n))
    } else {
        Ok(())
    }
}

fn alternating(len: usize) -> Vec<i128> {
    (0..len).map(|k| if k % 2 == 0 { 1 } else { -1 }).collect()
}

fn to_c64(x: &[i128], scale: f64) -> Vec<C64> {
    x.iter().map(|&v| C64::new(v as f64 * scale, 0.0)).collect()
}

pub fn wheel_build(n: usize, tol: &Tolerance) -> Result<WheelGraph> {
    check_order(n)?;
    let m = n - 1;
    let u: Vec<i128> = (0..m)
        .map(|k| match k.min(m - k) {
            0 => 0,
            1 => 1,
            _ => 2,
        })
        .collect();
    let d = bordered(0.0, 1.0, &circ_materialize(&to_c64(&u, 1.0)));
    let a: Vec<f64> = std::iter::once(0.0).chain((0..m).map(|k| if k % 2 == 0 { -1.0 } else { 1.0 })).collect();

    let da = d.mul_vec_real(&a).iter().map(|x| x.norm()).fold(0.0, f64::max);
    if da != 0.0 {
        return Err(Error::Invariant(format!("Da = 0 fails by {da:.3e}")));
    }
    let rank = svd(&d, tol)?.rank;
    if rank != n - 1 {
        return Err(Error::Invariant(format!("wheel distance matrix has rank {rank}, want {}", n - 1)));
    }
    Ok(WheelGraph {
        n,
        d,
        a,
        u,
        v: alternating(m),
        z24: wheel_z(n)?,
    })
}

/// `[[corner, border·eᵗ], [border·e, core]]`.
fn bordered(corner: f64, border: f64, core: &Matrix) -> Matrix {
    let m = core.rows();
    Matrix::block2x2(
        &Matrix::from_real(1, 1, &[corner]).expect("1x1"),
        &Matrix::from_real(1, m, &vec![border; m]).expect("row"),
        &Matrix::from_real(m, 1, &vec![border; m]).expect("column"),
        core,
    )
}

/// `24 z` for the wheel of order `n`, indexed `0..n−1`.
pub fn wheel_z(n: usize) -> Result<Vec<i128>> {
    check_order(n)?;
    let nn = n as i128;
    let n1 = nn - 1;
    let cubic = nn * nn * nn - 3 * nn * nn;
    let h = (n - 1) / 2;
    let mut z = vec![0i128; n - 1];
    z[0] = 2 * (-cubic + nn + 9);
    for k in 1..h {
        let kk = k as i128;
        z[k] = if k % 2 == 0 {
            2 * (-6 * n1 * kk * kk + 6 * n1 * n1 * kk - cubic + nn + 9)
        } else {
            2 * (6 * n1 * kk * kk - 6 * n1 * n1 * kk + cubic + 5 * nn - 15)
        };
    }
    z[h] = if n % 4 == 1 { cubic + 11 * nn + 15 } else { -cubic + nn - 27 };
    for k in h + 1..n - 1 {
        z[k] = z[n - 1 - k];
    }
    Ok(z)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZIdentityReport {
    pub n: usize,
    pub checks: Vec<IdentityCheck>,
}

impl ZIdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn holds(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.holds)
    }
}

pub fn wheel_z_identities(n: usize) -> Result<ZIdentityReport> {
    Ok(wheel_z_identities_for(n, &wheel_z(n)?))
}

/// Checks the integer identities of a candidate `24 z` exactly.
pub fn wheel_z_identities_for(n: usize, z24: &[i128]) -> ZIdentityReport {
    let mut checks = Vec::new();
    let mut push = |name, holds| checks.push(IdentityCheck { name, holds });
    let m = n - 1;
    if z24.len() != m || n < 5 || n.is_multiple_of(2) {
        push("shape", false);
        return ZIdentityReport { n, checks };
    }
    let z = z24;
    let n1 = m as i128;
    let sum_par = |p: usize, skip: Option<usize>| -> i128 {
        (0..m).filter(|&l| l % 2 == p && Some(l) != skip).map(|l| z[l]).sum()
    };

    push("symmetry", (1..m).all(|k| z[k] == z[m - k]));
    push("even_sum", sum_par(0, None) == 12 * n1);
    push("odd_sum", sum_par(1, None) == -12 * n1);

    let column_sums_zero = (0..m).all(|j| (0..m).map(|i| z[(j + m - i) % m]).sum::<i128>() == 0);
    push("column_sums", column_sums_zero);

    let w = wheel_completion_generator(n);
    let product = circ_mul_exact(&w, z).expect("equal lengths");
    let product_ok = product
        .iter()
        .enumerate()
        .all(|(k, &c)| c == 24 * (if k == 0 { n1 * n1 } else { 0 } - n1));
    push("circulant_product", product_ok);

    let rec = |k: usize| 2 * z[k] + z[k - 1] + z[k + 1];
    push("recurrence_even", (2..=m - 2).step_by(2).all(|k| rec(k) == 48 * n1));
    push("recurrence_odd", (1..=m - 2).step_by(2).all(|k| rec(k) == 0));

    let pi0 = 2 * (2..=m - 2).step_by(2).map(|l| z[l]).sum::<i128>() - z[1] - z[m - 1];
    push("boundary_first", pi0 == 24 * n1 * (n1 - 1));
    let inner = |p: usize, k: usize| 2 * sum_par(p, Some(k)) - z[k - 1] - z[k + 1];
    push("boundary_even", (2..=m - 2).step_by(2).all(|k| inner(0, k) == -24 * n1));
    push("boundary_odd", (1..=m - 2).step_by(2).all(|k| inner(1, k) == -24 * n1));
    let last = 2 * (1..=m - 3).step_by(2).map(|l| z[l]).sum::<i128>() - z[0] - z[m - 2];
    push("boundary_last", last == -24 * n1);

    ZIdentityReport { n, checks }
}

/// Generator `u + v = (1, 0, 3, 1, …, 3, 1, 3, 0)` of the lower block of `D + aaᵗ`.
pub fn wheel_completion_generator(n: usize) -> Vec<i128> {
    let m = n - 1;
    let mut u = vec![2i128; m];
    u[0] = 0;
    u[1] = 1;
    u[m - 1] = 1;
    u.iter().zip(alternating(m)).map(|(a, b)| a + b).collect()
}

#[derive(Debug, Clone)]
pub struct WheelPinv {
    /// `(D + aaᵗ)⁻¹`, a {1,3,4}-inverse of `D`.
    pub inv134: Matrix,
    pub pinv: Matrix,
    /// `max |(D + aaᵗ) inv134 − I|`.
    pub inverse_residual: f64,
    pub report: ResidualReport,
}

/// Closed-form `(D + aaᵗ)⁻¹` and `D†`. Both are `1/(n−1)²` times a
/// bordered block with corner `−2(n−1)(n−3)` and border `(n−1)e`; the core
/// is `circ(z)` for the inverse and `circ(z − v)` for `D†`, since `aaᵗ`
/// carries `circ(v)` in its lower block.
pub fn wheel_pinv(w: &WheelGraph, tol: &Tolerance) -> Result<WheelPinv> {
    let n = w.n;
    let n1 = (n - 1) as f64;
    let s = 1.0 / (n1 * n1);
    let corner = -2.0 * n1 * (n as f64 - 3.0) * s;
    let core_z = circ_materialize(&to_c64(&w.z24, s / 24.0));
    let zv: Vec<i128> = w.z24.iter().zip(&w.v).map(|(z, v)| z - 24 * v).collect();
    let core_zv = circ_materialize(&to_c64(&zv, s / 24.0));
    let inv134 = bordered(corner, n1 * s, &core_z);
    let pinv = bordered(corner, n1 * s, &core_zv);

    let completed = &w.d + &Matrix::outer_real(&w.a, &w.a);
    let inverse_residual = (&completed * &inv134).max_abs_diff(&Matrix::identity(n));
    if inverse_residual > 1e-10 {
        return Err(Error::Invariant(format!("(D + aaᵗ)·inv134 = I fails by {inverse_residual:.3e}")));
    }
    let report = penrose_residuals(&w.d, &pinv, &tol.scaled_for(&w.d))?;
    if !report.all_pass() {
        return Err(Error::Invariant(format!(
            "closed-form wheel pinv fails Penrose checks (max {:.3e})",
            report.max_residual()
        )));
    }
    Ok(WheelPinv {
        inv134,
        pinv,
        inverse_residual,
        report,
    })
}

/// Extreme eigenvalues of a Hermitian matrix, read off the smallest singular
/// values of `H ± sI` with `s = ‖H‖_F`.
fn eig_extremes(h: &Matrix, tol: &Tolerance) -> Result<(f64, f64)> {
    let n = h.rows();
    let s = h.frobenius_norm().max(1.0);
    let shift = Matrix::identity(n).scale_real(s);
    let lo = svd(&(h + &shift), tol)?.sigma.last().copied().unwrap_or(0.0) - s;
    let hi = s - svd(&(&shift - h), tol)?.sigma.last().copied().unwrap_or(0.0);
    Ok((lo, hi))
}

#[derive(Debug, Clone, Serialize)]
pub struct WheelProperties {
    pub n: usize,
    /// `max |(D + aaᵗ)⁻¹a − a/(n−1)|`.
    pub eigenvector_residual: f64,
    /// `‖D† − (D + aaᵗ)⁻¹(I − aaᵗ/(n−1))‖_F`.
    pub product_form_residual: f64,
    #[serde(skip)]
    pub laplacian: Matrix,
    pub laplacian_norm: f64,
    pub laplacian_e_residual: f64,
    pub laplacian_rank: usize,
    pub laplacian_min_eig: f64,
    /// `‖D† − (−L̃/2 + (4/(n−1))wwᵗ)‖_F`.
    pub decomposition_residual: f64,
    /// Largest eigenvalue of `P((D + aaᵗ)⁻¹ − (4/(n−1))wwᵗ)P`, `P` the
    /// projector onto `R(D)`.
    pub projected_max_eig: f64,
    pub holds: bool,
}

pub fn wheel_properties(w: &WheelGraph, tol: &Tolerance) -> Result<WheelProperties> {
    let n = w.n;
    let n1 = (n - 1) as f64;
    let wp = wheel_pinv(w, tol)?;

    let ia = wp.inv134.mul_vec_real(&w.a);
    let eigenvector_residual = ia.iter().zip(&w.a).map(|(x, a)| (x - a / n1).norm()).fold(0.0, f64::max);

    let p = &Matrix::identity(n) - &Matrix::outer_real(&w.a, &w.a).scale_real(1.0 / n1);
    let product_form_residual = wp.pinv.distance(&(&wp.inv134 * &p));

    let wv: Vec<f64> = std::iter::once((5.0 - n as f64) / 4.0).chain(std::iter::repeat_n(0.25, n - 1)).collect();
    let wwt = Matrix::outer_real(&wv, &wv).scale_real(4.0 / n1);
    let core = &wp.inv134 - &wwt;
    let laplacian = hermitian_part(&(&core * &p).scale_real(-2.0));
    let laplacian_norm = laplacian.frobenius_norm();
    let laplacian_e_residual = laplacian.mul_vec_real(&vec![1.0; n]).iter().map(|x| x.norm()).fold(0.0, f64::max);
    let laplacian_rank = svd(&laplacian, tol)?.rank;
    let (laplacian_min_eig, _) = eig_extremes(&laplacian, tol)?;
    let decomposition_residual = wp.pinv.distance(&(&laplacian.scale_real(-0.5) + &wwt));

    let projected = hermitian_part(&(&(&p * &core) * &p));
    let (_, projected_max_eig) = eig_extremes(&projected, tol)?;

    let bound = tol.residual_abs * laplacian_norm.max(1.0);
    let holds = eigenvector_residual <= 1e-10
        && product_form_residual <= bound
        && laplacian_e_residual <= bound
        && laplacian_rank == n - 2
        && laplacian_min_eig >= -bound
        && decomposition_residual <= bound
        && projected_max_eig <= tol.residual_abs * projected.frobenius_norm().max(1.0);
    Ok(WheelProperties {
        n,
        eigenvector_residual,
        product_form_residual,
        laplacian,
        laplacian_norm,
        laplacian_e_residual,
        laplacian_rank,
        laplacian_min_eig,
        decomposition_residual,
        projected_max_eig,
        holds,
    })
}
