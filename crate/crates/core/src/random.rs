//! Seeded random instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{complete_basis, orthonormalize};
use crate::matrix::{Matrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn random_real_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), 0.0))
}

/// Haar-like unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let g = random_matrix(rng, n, n);
    let cols: Vec<Vec<C64>> = (0..n).map(|j| g.column_vec(j)).collect();
    let q = complete_basis(orthonormalize(&cols, 1e-10), n);
    Matrix::from_columns(n, &q)
}

/// Matrix of rank at most `rank` whose columns repeat `rank` random columns
/// in shuffled positions.
pub fn random_repeated_columns<R: Rng>(rng: &mut R, rows: usize, cols: usize, rank: usize) -> Matrix {
    let rank = rank.clamp(1, cols);
    let base = random_matrix(rng, rows, rank);
    let mut sources: Vec<usize> = (0..cols).map(|j| j % rank).collect();
    sources.shuffle(rng);
    Matrix::from_fn(rows, cols, |i, j| base.get(i, sources[j]))
}

pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_matrix() {
        let a = random_matrix(&mut seeded_rng(5), 3, 4);
        let b = random_matrix(&mut seeded_rng(5), 3, 4);
        assert_eq!(a, b);
    }

    #[test]
    fn unitary_is_unitary() {
        let q = random_unitary(&mut seeded_rng(1), 6);
        assert!((&q.adjoint() * &q).distance(&Matrix::identity(6)) < 1e-13);
    }
}
