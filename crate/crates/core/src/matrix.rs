//! Dense complex matrices stored row-major.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A dense `rows x cols` complex matrix. Entries are finite and the shape
/// is fixed at construction.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes,
    /// size mismatches and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix construction",
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        if let Some((index, value)) = data
            .iter()
            .enumerate()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                index,
                value: value.to_string(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Builds a matrix from nested real rows. Panics on ragged input; meant
    /// for literals in code and tests.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend(r.as_ref().iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::new(rows.len(), cols, data).expect("valid literal matrix")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix shape must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// Column vector `n x 1`.
    pub fn column(values: &[C64]) -> Self {
        Self::from_fn(values.len(), 1, |i, _| values[i])
    }

    pub fn column_real(values: &[f64]) -> Self {
        Self::from_fn(values.len(), 1, |i, _| C64::new(values[i], 0.0))
    }

    /// The dyad `x y*`.
    pub fn outer(x: &[C64], y: &[C64]) -> Self {
        Self::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
    }

    pub fn outer_real(x: &[f64], y: &[f64]) -> Self {
        Self::from_fn(x.len(), y.len(), |i, j| C64::new(x[i] * y[j], 0.0))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        assert!(!columns.is_empty());
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column_vec(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Keeps the columns in `range`.
    pub fn columns_range(&self, range: std::ops::Range<usize>) -> Option<Self> {
        if range.is_empty() {
            return None;
        }
        let start = range.start;
        Some(Self::from_fn(self.rows, range.len(), |i, j| self.get(i, start + j)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖self − other‖_F`; panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in distance");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "shape mismatch in mul_vec");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_vec_real(&self, x: &[f64]) -> Vec<C64> {
        let xc: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.mul_vec(&xc)
    }

    /// Matrix product with a shape check.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", other.rows),
            });
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; m * n];
        for i in 0..m {
            let out_row = &mut out[i * n..(i + 1) * n];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[p * n..(p + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Self {
            rows: m,
            cols: n,
            data: out,
        }
    }

    /// `[self; below]`.
    pub fn vstack(&self, below: &Self) -> Self {
        assert_eq!(self.cols, below.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Self {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        }
    }

    /// Assembles `[[a, b], [c, d]]` from conforming blocks.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let (top, left) = (a.rows, a.cols);
        Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < top, j < left) {
            (true, true) => a.get(i, j),
            (true, false) => b.get(i, j - left),
            (false, true) => c.get(i - top, j),
            (false, false) => d.get(i - top, j - left),
        })
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn sum_all<'a>(terms: impl IntoIterator<Item = &'a Matrix>) -> Option<Self> {
        let mut it = terms.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| &acc + m))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                if z.im == 0.0 {
                    write!(f, "{:>10.4} ", z.re)?;
                } else {
                    write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.map(|z| -z)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "shape mismatch in product: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        self.mul_unchecked(rhs)
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `x* y`.
pub fn vec_dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn to_complex(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&v| C64::new(v, 0.0)).collect()
}
