//! Python bindings. Matrices cross the boundary as nested lists of Python
//! numbers (real or complex); everything else is plain lists and dicts.

use num_complex::Complex64;
use pinvkit_core::circulant::{circ_pinv_spectral, two_term_pinv, zero_sum_shift_pinv};
use pinvkit_core::graphdist::{tree_build, tree_pinv, wheel_build, wheel_pinv, WeightedTree};
use pinvkit_core::io::{matrix_from_json, matrix_to_json};
use pinvkit_core::sumdecomp::{
    check_orthogonality, completion_pinv_pair, gen_svd_block_family, rank_completion_pinv, Completion, PairMode,
};
use pinvkit_core::verify::full_report;
use pinvkit_core::{penrose_residuals, pinv_normal_equations, pinv_oracle, svd, Matrix as CoreMatrix, Tolerance};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pinvkit, PinvkitError, PyValueError, "Raised when a pinvkit routine rejects its input.");

fn err(e: pinvkit_core::Error) -> PyErr {
    PinvkitError::new_err(e.to_string())
}

fn tolerance(tol_rank: Option<f64>, tol_residual: Option<f64>) -> PyResult<Tolerance> {
    let d = Tolerance::default();
    Tolerance::new(tol_rank.unwrap_or(d.rank_rel), tol_residual.unwrap_or(d.residual_abs)).map_err(err)
}

/// Dense complex matrix.
#[pyclass(name = "Matrix", module = "pinvkit", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMatrix {
    inner: CoreMatrix,
}

impl From<CoreMatrix> for PyMatrix {
    fn from(inner: CoreMatrix) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(PinvkitError::new_err("rows have different lengths"));
        }
        let n = rows.len();
        let data = rows.into_iter().flatten().collect();
        Ok(CoreMatrix::new(n, cols, data).map_err(err)?.into())
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        CoreMatrix::identity(n).into()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(matrix_from_json(text).map_err(err)?.into())
    }

    fn to_json(&self) -> String {
        matrix_to_json(&self.inner)
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        (0..self.inner.rows()).map(|i| self.inner.row(i).to_vec()).collect()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    fn adjoint(&self) -> Self {
        self.inner.adjoint().into()
    }

    fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    /// Frobenius distance to another matrix of the same shape.
    fn distance(&self, other: &PyMatrix) -> PyResult<f64> {
        if self.inner.shape() != other.inner.shape() {
            return Err(PinvkitError::new_err("shape mismatch"));
        }
        Ok(self.inner.distance(&other.inner))
    }

    fn rank(&self) -> PyResult<usize> {
        Ok(svd(&self.inner, &Tolerance::default()).map_err(err)?.rank)
    }

    fn __matmul__(&self, other: &PyMatrix) -> PyResult<Self> {
        Ok(self.inner.try_mul(&other.inner).map_err(err)?.into())
    }

    fn __repr__(&self) -> String {
        let (m, n) = self.inner.shape();
        format!("Matrix({m}x{n})")
    }
}

/// Pseudoinverse by `method`: "svd", "normal", "rank-completion" or "pair"
/// (the last needs `aux`, a matrix with R(aux*) = N(a)).
#[pyfunction]
#[pyo3(signature = (a, method = "svd", aux = None, tol_rank = None, tol_residual = None))]
fn pinv(
    a: &PyMatrix,
    method: &str,
    aux: Option<&PyMatrix>,
    tol_rank: Option<f64>,
    tol_residual: Option<f64>,
) -> PyResult<PyMatrix> {
    let tol = tolerance(tol_rank, tol_residual)?;
    let a = &a.inner;
    let x = match method {
        "svd" => pinv_oracle(a, &tol),
        "normal" => pinv_normal_equations(a, &tol),
        "rank-completion" => rank_completion_pinv(a, &Completion::Auto, &tol).map(|r| r.pinv),
        "pair" => {
            let b = aux.ok_or_else(|| PinvkitError::new_err("method 'pair' needs aux"))?;
            completion_pinv_pair(a, &b.inner, PairMode::Gram, &tol).map(|r| r.pinv)
        }
        other => return Err(PinvkitError::new_err(format!("unknown method {other:?}"))),
    }
    .map_err(err)?;
    let check = penrose_residuals(a, &x, &tol.scaled_for(a)).map_err(err)?;
    if !check.all_pass() {
        return Err(PinvkitError::new_err(format!(
            "self-check failed: max Penrose residual {:e} exceeds {:e}",
            check.max_residual(),
            check.residual_abs
        )));
    }
    Ok(x.into())
}

/// Penrose and characterization residuals of `x` as a candidate for `a†`.
/// Returns `{"pass": bool, "bound": float, "residuals": {name: float}}`.
#[pyfunction]
#[pyo3(signature = (a, x, tol_rank = None, tol_residual = None))]
fn verify<'py>(
    py: Python<'py>,
    a: &PyMatrix,
    x: &PyMatrix,
    tol_rank: Option<f64>,
    tol_residual: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let tol = tolerance(tol_rank, tol_residual)?.scaled_for(&a.inner);
    let r = full_report(&a.inner, &x.inner, &tol).map_err(err)?;
    let residuals = PyDict::new(py);
    for e in &r.entries {
        residuals.set_item(&e.name, e.residual)?;
    }
    let out = PyDict::new(py);
    out.set_item("pass", r.all_pass())?;
    out.set_item("bound", r.residual_abs)?;
    out.set_item("residuals", residuals)?;
    Ok(out)
}

/// Generator (first row) of `circ(gen)†`. `method` is "spectral" or
/// "zero-sum"; `alpha` is the completion shift for the latter.
#[pyfunction]
#[pyo3(signature = (gen, method = "spectral", alpha = None))]
fn circ_pinv(gen: Vec<Complex64>, method: &str, alpha: Option<Complex64>) -> PyResult<Vec<Complex64>> {
    let tol = Tolerance::default();
    let c = match method {
        "spectral" => circ_pinv_spectral(&gen, &tol),
        "zero-sum" => zero_sum_shift_pinv(&gen, alpha, &tol),
        other => return Err(PinvkitError::new_err(format!("unknown method {other:?}"))),
    }
    .map_err(err)?;
    Ok(c.into_gen())
}

/// Generator of the pseudoinverse of the order-`n` circulant with `alpha`
/// at one-based position `k` and `beta` right after it.
#[pyfunction]
#[pyo3(name = "two_term_pinv")]
fn py_two_term_pinv(alpha: Complex64, beta: Complex64, k: usize, n: usize) -> PyResult<Vec<Complex64>> {
    Ok(two_term_pinv(alpha, beta, k, n, &Tolerance::default()).map_err(err)?.pinv.into_gen())
}

fn weighted_tree(edges: Vec<(usize, usize, f64)>) -> PyResult<WeightedTree> {
    WeightedTree::from_edges(edges).map_err(err)
}

/// Path-weight distance matrix of a tree on vertices 1..n given as
/// `(i, j, w)` edges.
#[pyfunction]
fn tree_distance(edges: Vec<(usize, usize, f64)>) -> PyResult<PyMatrix> {
    Ok(tree_build(&weighted_tree(edges)?).map_err(err)?.d.into())
}

/// Closed-form distance-matrix pseudoinverse of a tree whose weights sum
/// to zero.
#[pyfunction]
#[pyo3(name = "tree_pinv", signature = (edges, alpha = None))]
fn py_tree_pinv(edges: Vec<(usize, usize, f64)>, alpha: Option<f64>) -> PyResult<PyMatrix> {
    let t = weighted_tree(edges)?;
    let tm = tree_build(&t).map_err(err)?;
    Ok(tree_pinv(&t, &tm, alpha, &Tolerance::default()).map_err(err)?.pinv.into())
}

#[pyfunction]
fn wheel_distance(n: usize) -> PyResult<PyMatrix> {
    Ok(wheel_build(n, &Tolerance::default()).map_err(err)?.d.into())
}

/// Closed-form distance-matrix pseudoinverse of the wheel on odd `n >= 5`
/// vertices (hub first).
#[pyfunction]
#[pyo3(name = "wheel_pinv")]
fn py_wheel_pinv(n: usize) -> PyResult<PyMatrix> {
    let tol = Tolerance::default();
    let w = wheel_build(n, &tol).map_err(err)?;
    Ok(wheel_pinv(&w, &tol).map_err(err)?.pinv.into())
}

/// Seeded family with mutually orthogonal ranges and coranges, so the
/// pseudoinverse of the sum is the sum of the pseudoinverses.
#[pyfunction]
fn sum_family(seed: u64, rows: usize, cols: usize, ranks: Vec<usize>) -> PyResult<Vec<PyMatrix>> {
    let fam = gen_svd_block_family(seed, rows, cols, &ranks).map_err(err)?;
    if !check_orthogonality(&fam, &Tolerance::default()).holds {
        return Err(PinvkitError::new_err("generated family failed its orthogonality check"));
    }
    Ok(fam.members().iter().cloned().map(PyMatrix::from).collect())
}

#[pymodule]
fn pinvkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PinvkitError", m.py().get_type::<PinvkitError>())?;
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(pinv, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(circ_pinv, m)?)?;
    m.add_function(wrap_pyfunction!(py_two_term_pinv, m)?)?;
    m.add_function(wrap_pyfunction!(tree_distance, m)?)?;
    m.add_function(wrap_pyfunction!(py_tree_pinv, m)?)?;
    m.add_function(wrap_pyfunction!(wheel_distance, m)?)?;
    m.add_function(wrap_pyfunction!(py_wheel_pinv, m)?)?;
    m.add_function(wrap_pyfunction!(sum_family, m)?)?;
    Ok(())
}
