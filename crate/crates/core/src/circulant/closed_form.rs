use serde::Serialize;

use super::{circ_mul_exact, circ_pinv_spectral, circ_spectrum, shift_generator, Circulant};
use crate::error::{Error, Result};
use crate::matrix::C64;
use crate::tolerance::{Tolerance, UNIT_ROUNDOFF};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn nearly_equal(a: C64, b: C64) -> bool {
    (a - b).norm() <= 8.0 * UNIT_ROUNDOFF * a.norm().max(b.norm())
}

/// `(1/(2n²)) w` with `w[k] = (−1)^k (n² − (2k+1) n + 2)`: the inverse of
/// `circ(2, 0, 1, −1, …, 1, −1)` for even `n`.
pub fn lemma_alternating_inverse(n: usize) -> Result<Circulant> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("order must be even and >= 2, got {n}")));
    }
    let nf = n as f64;
    Circulant::new(
        (0..n)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                c(sign * (nf * nf - (2.0 * k as f64 + 1.0) * nf + 2.0) / (2.0 * nf * nf))
            })
            .collect(),
    )
}

/// Inverse of `circ(2, 0, 1, …, 1)`:
/// `−(1/(2n)) circ(1, 3, …, 2n−1) + ((n² + 2)/(2n²)) eeᵗ`.
pub fn lemma_shifted_ones_inverse(n: usize) -> Result<Circulant> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("order must be >= 2, got {n}")));
    }
    let nf = n as f64;
    let constant = (nf * nf + 2.0) / (2.0 * nf * nf);
    Circulant::new((0..n).map(|k| c(-(2.0 * k as f64 + 1.0) / (2.0 * nf) + constant)).collect())
}

/// `circ(2, 0, 1, …, 1)`, the generator inverted by
/// [`lemma_shifted_ones_inverse`].
pub fn shift_ones_pattern(n: usize) -> Vec<C64> {
    (0..n).map(|k| c(match k { 0 => 2.0, 1 => 0.0, _ => 1.0 })).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TwoTermPath {
    /// `βⁿ ≠ (−1)ⁿ αⁿ`: invertible, spectral inverse.
    Nonsingular,
    /// `α = β`, `n` even: null space spanned by `(1, −1, …)`.
    AlternatingNull,
    /// `α = −β`: null space spanned by `e`.
    ConstantNull,
    /// Singular without a closed form; spectral pseudoinverse.
    SpectralSingular,
}

#[derive(Debug, Clone)]
pub struct TwoTermPinv {
    pub pinv: Circulant,
    pub path: TwoTermPath,
}

/// Pseudoinverse of `α Π^{s} + β Π^{s+1}` with `s = k_pos − 1`, i.e. the
/// circulant whose generator holds `α` at one-based position `k_pos` and
/// `β` right after it (cyclically).
pub fn two_term_pinv(alpha: C64, beta: C64, k_pos: usize, n: usize, tol: &Tolerance) -> Result<TwoTermPinv> {
    let zero = c(0.0);
    if alpha == zero || beta == zero {
        return Err(Error::InvalidParameter("alpha and beta must be nonzero".into()));
    }
    if n < 2 || k_pos == 0 || k_pos > n {
        return Err(Error::InvalidParameter(format!("need n >= 2 and 1 <= k_pos <= n, got n = {n}, k_pos = {k_pos}")));
    }
    let nf = n as f64;
    let mut base = vec![zero; n];
    base[0] = alpha;
    base[1] = beta;
    let singular = !circ_spectrum(&base, tol).is_invertible();

    let (gen, path) = if !singular {
        (circ_pinv_spectral(&base, tol)?.into_gen(), TwoTermPath::Nonsingular)
    } else if n.is_multiple_of(2) && nearly_equal(alpha, beta) {
        let w = lemma_alternating_inverse(n)?;
        // (1/(α n²)) (½ w' − v) where w' = 2n² · lemma generator
        let g = (0..n)
            .map(|k| {
                let v = if k % 2 == 0 { 1.0 } else { -1.0 };
                (w.gen()[k] * nf * nf - v) / (alpha * nf * nf)
            })
            .collect();
        (g, TwoTermPath::AlternatingNull)
    } else if nearly_equal(alpha, -beta) {
        let g = (0..n)
            .map(|k| c(nf - 1.0 - 2.0 * k as f64) / (alpha * 2.0 * nf))
            .collect();
        (g, TwoTermPath::ConstantNull)
    } else {
        (circ_pinv_spectral(&base, tol)?.into_gen(), TwoTermPath::SpectralSingular)
    };
    // (Π^s B)† = B† Π^{n−s}
    let s = k_pos - 1;
    Ok(TwoTermPinv {
        pinv: Circulant::new(shift_generator(&gen, (n - s) % n))?,
        path,
    })
}

#[derive(Debug, Clone)]
pub struct SupportSplit {
    pub pinv: Circulant,
    /// The supports cover every index, so the sum is invertible.
    pub invertible: bool,
}

/// `circ(∑ c_k)† = ∑ circ(c_k)†` when the eigenvalue supports of the
/// generators are pairwise disjoint.
///
/// Disjointness is required between `supp λ_j` and `supp λ_k`, the
/// spectrum of `circ(c_k)` itself, which is what `circ(c_j)* circ(c_k) = 0`
/// amounts to. For real generators this is the same as comparing against
/// the spectrum of the transpose.
pub fn support_split_pinv(generators: &[Vec<C64>], tol: &Tolerance) -> Result<SupportSplit> {
    let n = generators.first().map(Vec::len).ok_or_else(|| Error::InvalidParameter("no generators given".into()))?;
    if let Some(bad) = generators.iter().find(|g| g.len() != n) {
        return Err(Error::DimensionMismatch {
            context: "support splitting",
            expected: format!("length {n}"),
            found: format!("length {}", bad.len()),
        });
    }
    let spectra: Vec<_> = generators.iter().map(|g| circ_spectrum(g, tol)).collect();
    for j in 0..spectra.len() {
        for k in (j + 1)..spectra.len() {
            let common: Vec<usize> = spectra[j]
                .support
                .iter()
                .copied()
                .filter(|i| spectra[k].support.binary_search(i).is_ok())
                .collect();
            if !common.is_empty() {
                return Err(Error::SupportOverlap {
                    first: j,
                    second: k,
                    indices: common,
                });
            }
        }
    }
    let mut total = vec![c(0.0); n];
    for g in generators {
        for (t, x) in total.iter_mut().zip(circ_pinv_spectral(g, tol)?.gen()) {
            *t += x;
        }
    }
    let covered: usize = spectra.iter().map(|s| s.support.len()).sum();
    Ok(SupportSplit {
        pinv: Circulant::new(total)?,
        invertible: covered == n,
    })
}

type Inner<'a> = dyn Fn(&[C64]) -> Result<Circulant> + 'a;

/// `circ(c)† = circ(c − mean)† + eeᵗ / (n ∑c)` for `∑c ≠ 0`; the zero-sum
/// part is pseudo-inverted by `inner`.
pub fn mean_removal_pinv_with(gen: &[C64], inner: &Inner<'_>) -> Result<Circulant> {
    let n = gen.len();
    let sum: C64 = gen.iter().sum();
    if sum == c(0.0) {
        return Err(Error::InvalidParameter("mean removal needs a nonzero generator sum".into()));
    }
    let mean = sum / n as f64;
    let centered: Vec<C64> = gen.iter().map(|x| x - mean).collect();
    let add = (sum * n as f64).inv();
    Circulant::new(inner(&centered)?.gen().iter().map(|x| x + add).collect())
}

/// `circ(c)† = circ(c + α)† − eeᵗ / (n² α)` for zero-sum `c`; the shifted
/// generator is pseudo-inverted by `inner`.
pub fn constant_shift_pinv_with(gen: &[C64], alpha: C64, inner: &Inner<'_>) -> Result<Circulant> {
    if alpha == c(0.0) {
        return Err(Error::InvalidParameter("alpha must be nonzero for a zero-sum generator".into()));
    }
    let n = gen.len() as f64;
    let shifted: Vec<C64> = gen.iter().map(|x| x + alpha).collect();
    let sub = (alpha * n * n).inv();
    Circulant::new(inner(&shifted)?.gen().iter().map(|x| x - sub).collect())
}

/// Zero-sum shift with the spectral pseudoinverse as the inner solver.
/// Zero-sum generators (eigenvalue at index 0 below the cutoff) need a
/// nonzero `alpha`; others use mean removal and ignore `alpha`.
pub fn zero_sum_shift_pinv(gen: &[C64], alpha: Option<C64>, tol: &Tolerance) -> Result<Circulant> {
    Circulant::new(gen.to_vec())?;
    let spectral = |g: &[C64]| circ_pinv_spectral(g, tol);
    let zero_sum = circ_spectrum(gen, tol).support.first() != Some(&0);
    if zero_sum {
        match alpha {
            Some(a) => constant_shift_pinv_with(gen, a, &spectral),
            None => Err(Error::InvalidParameter("zero-sum generator requires a nonzero alpha".into())),
        }
    } else {
        mean_removal_pinv_with(gen, &spectral)
    }
}

/// Integer generator `(k, −1 ×k)` repeated `q` times; its circulant `C`
/// satisfies `C² = nC` with `n = q(k+1)`.
pub fn block_pattern_generator(k: usize, q: usize) -> Result<Vec<i128>> {
    if k == 0 || q == 0 {
        return Err(Error::InvalidParameter(format!("k and q must be positive, got k = {k}, q = {q}")));
    }
    Ok((0..q * (k + 1))
        .map(|j| if j % (k + 1) == 0 { k as i128 } else { -1 })
        .collect())
}

#[derive(Debug, Clone)]
pub struct BlockPatternPinv {
    /// Generator of `α eeᵗ + β C`.
    pub matrix: Circulant,
    pub pinv: Circulant,
}

/// Pseudoinverse of `α eeᵗ + β C`, i.e. the generator
/// `(α + kβ, (α − β) ×k)` repeated `q` times:
/// `eeᵗ / (α n²) + C / (β n²)`. A zero coefficient drops its term.
pub fn block_pattern_pinv(alpha: C64, beta: C64, k: usize, q: usize) -> Result<BlockPatternPinv> {
    let pattern = block_pattern_generator(k, q)?;
    let n = pattern.len();
    let square = circ_mul_exact(&pattern, &pattern)?;
    if square.iter().zip(&pattern).any(|(s, p)| *s != n as i128 * p) {
        return Err(Error::Invariant(format!("pattern square differs from n C for k = {k}, q = {q}")));
    }
    let n2 = (n * n) as f64;
    let zero = c(0.0);
    let e_coef = if alpha == zero { zero } else { (alpha * n2).inv() };
    let c_coef = if beta == zero { zero } else { (beta * n2).inv() };
    let matrix = pattern.iter().map(|&p| alpha + beta * p as f64).collect();
    let pinv = pattern.iter().map(|&p| e_coef + c_coef * p as f64).collect();
    Ok(BlockPatternPinv {
        matrix: Circulant::new(matrix)?,
        pinv: Circulant::new(pinv)?,
    })
}

/// Block pattern `circ(a, b ×k, a, b ×k, …)` via
/// `α = (a + kb)/(k+1)` and `β = (a − b)/(k+1)`.
pub fn block_pattern_from_ab(a: C64, b: C64, k: usize, q: usize) -> Result<BlockPatternPinv> {
    let kf = k as f64;
    block_pattern_pinv((a + b * kf) / (kf + 1.0), (a - b) / (kf + 1.0), k, q)
}
