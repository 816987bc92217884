//! Circulant matrices `circ(c) = ∑ c[l] Π^l`, where `c` is the first row
//! and `Π = circ(0, 1, 0, …, 0)` is the cyclic shift. Generators are
//! zero-based: `circ(c)[i][j] = c[(j − i) mod n]`.
//!
//! Eigenvalues are `λ[k] = ∑_l c[l] ω^{kl}` with `ω = e^{2πi/n}`; the
//! unitary Fourier matrix diagonalizes every circulant, so the
//! pseudoinverse inverts the nonzero eigenvalues. A circulant's group
//! inverse and Moore-Penrose inverse coincide.

mod closed_form;

pub use closed_form::{
    block_pattern_from_ab, block_pattern_generator, block_pattern_pinv, constant_shift_pinv_with,
    lemma_alternating_inverse, lemma_shifted_ones_inverse, mean_removal_pinv_with, shift_ones_pattern,
    support_split_pinv, two_term_pinv, zero_sum_shift_pinv, BlockPatternPinv, SupportSplit, TwoTermPath,
    TwoTermPinv,
};

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, C64};
use crate::tolerance::Tolerance;

/// Generator of a circulant matrix of order `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circulant {
    gen: Vec<C64>,
}

impl Circulant {
    pub fn new(gen: Vec<C64>) -> Result<Self> {
        if gen.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "circulant order must be at least 2, got {}",
                gen.len()
            )));
        }
        if let Some((index, z)) = gen.iter().enumerate().find(|(_, z)| !z.is_finite()) {
            return Err(Error::NonFinite {
                index,
                value: z.to_string(),
            });
        }
        Ok(Self { gen })
    }

    pub fn from_real(gen: &[f64]) -> Result<Self> {
        Self::new(gen.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.gen.len()
    }

    pub fn gen(&self) -> &[C64] {
        &self.gen
    }

    pub fn into_gen(self) -> Vec<C64> {
        self.gen
    }

    pub fn materialize(&self) -> Matrix {
        circ_materialize(&self.gen)
    }

    /// Generator of the transpose.
    pub fn transpose(&self) -> Self {
        Self { gen: rho(&self.gen) }
    }

    /// Generator of `circ(c) Π^m`, which is also `Π^m circ(c)`.
    pub fn shifted(&self, m: usize) -> Self {
        Self {
            gen: shift_generator(&self.gen, m),
        }
    }

    pub fn spectrum(&self, tol: &Tolerance) -> Spectrum {
        circ_spectrum(&self.gen, tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.gen
            .iter()
            .zip(&other.gen)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn circ_materialize(c: &[C64]) -> Matrix {
    let n = c.len();
    Matrix::from_fn(n, n, |i, j| c[(j + n - i) % n])
}

/// `ρ(c)`: keeps `c[0]` and reverses the rest, so `circ(c)ᵗ = circ(ρ(c))`.
pub fn rho<T: Copy>(c: &[T]) -> Vec<T> {
    let n = c.len();
    (0..n).map(|k| c[(n - k) % n]).collect()
}

/// `Π^l` of order `n`.
pub fn shift_power(n: usize, l: usize) -> Matrix {
    let mut g = vec![C64::new(0.0, 0.0); n];
    g[l % n] = C64::new(1.0, 0.0);
    circ_materialize(&g)
}

/// Generator of `circ(c) Π^m`: `y[j] = c[(j − m) mod n]`.
pub fn shift_generator<T: Copy>(c: &[T], m: usize) -> Vec<T> {
    let n = c.len();
    (0..n).map(|j| c[(j + n - m % n) % n]).collect()
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            context: "circulant generators",
            expected: format!("length {a}"),
            found: format!("length {b}"),
        });
    }
    Ok(())
}

/// Generator of `circ(a) circ(b)`: the cyclic convolution
/// `c[l] = ∑_k a[k] b[(l − k) mod n]`.
pub fn circ_mul(a: &[C64], b: &[C64]) -> Result<Vec<C64>> {
    check_lengths(a.len(), b.len())?;
    let n = a.len();
    Ok((0..n)
        .map(|l| (0..n).map(|k| a[k] * b[(l + n - k) % n]).sum())
        .collect())
}

/// Exact cyclic convolution of integer generators.
pub fn circ_mul_exact(a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    check_lengths(a.len(), b.len())?;
    let n = a.len();
    Ok((0..n)
        .map(|l| (0..n).map(|k| a[k] * b[(l + n - k) % n]).sum())
        .collect())
}

/// Table of `ω^m`, `m = 0..n`, with `ω = e^{2πi/n}`.
struct Twiddles(Vec<C64>);

impl Twiddles {
    fn new(n: usize) -> Self {
        Self(
            (0..n)
                .map(|m| {
                    let theta = 2.0 * PI * m as f64 / n as f64;
                    C64::new(theta.cos(), theta.sin())
                })
                .collect(),
        )
    }

    fn power(&self, e: usize) -> C64 {
        self.0[e % self.0.len()]
    }
}

/// `λ[k] = ∑_l c[l] ω^{kl}`.
pub fn eigenvalues(c: &[C64]) -> Vec<C64> {
    let n = c.len();
    let w = Twiddles::new(n);
    (0..n)
        .map(|k| (0..n).map(|l| c[l] * w.power(k * l)).sum())
        .collect()
}

/// Inverse of [`eigenvalues`]: `c[l] = (1/n) ∑_k λ[k] ω^{−kl}`.
pub fn generator_from_eigenvalues(lambda: &[C64]) -> Vec<C64> {
    let n = lambda.len();
    let w = Twiddles::new(n);
    (0..n)
        .map(|l| {
            let s: C64 = (0..n).map(|k| lambda[k] * w.power(k * (n - l % n) % n)).sum();
            s / n as f64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    #[serde(skip)]
    pub lambda: Vec<C64>,
    /// Indices of eigenvalues above the cutoff, ascending.
    pub support: Vec<usize>,
    pub cutoff: f64,
}

impl Spectrum {
    pub fn is_invertible(&self) -> bool {
        self.support.len() == self.lambda.len()
    }
}

/// Eigenvalues of `circ(c)` with the support taken at the same cutoff the
/// SVD rank uses: `|λ| > rank_rel · n · max|λ|`.
pub fn circ_spectrum(c: &[C64], tol: &Tolerance) -> Spectrum {
    let lambda = eigenvalues(c);
    let n = c.len();
    let max = lambda.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cutoff = tol.rank_cutoff(max, n, n);
    let support = (0..n).filter(|&k| lambda[k].norm() > cutoff).collect();
    Spectrum {
        lambda,
        support,
        cutoff,
    }
}

/// `circ(c)†` through the Fourier diagonalization.
pub fn circ_pinv_spectral(c: &[C64], tol: &Tolerance) -> Result<Circulant> {
    let spec = circ_spectrum(c, tol);
    let mut inv = vec![C64::new(0.0, 0.0); c.len()];
    for &k in &spec.support {
        inv[k] = spec.lambda[k].inv();
    }
    Circulant::new(generator_from_eigenvalues(&inv))
}
