//! Residual checks for the Penrose equations and the six equivalent
//! characterization systems of the Moore-Penrose inverse.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::oracle::projectors;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

/// Named Frobenius-norm residuals; each entry passes when its residual is
/// at most `residual_abs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub residual_abs: f64,
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    pub fn new(residual_abs: f64) -> Self {
        Self {
            residual_abs,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64) {
        let pass = residual <= self.residual_abs;
        self.entries.push(ResidualEntry {
            name: name.into(),
            residual,
            pass,
        });
    }

    pub fn get(&self, name: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn passes(&self, name: &str) -> bool {
        self.get(name).is_some_and(|e| e.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    /// Equations 1, 3 and 4 hold (a {1,3,4}-inverse); only meaningful on a
    /// Penrose report.
    pub fn is_134_inverse(&self) -> bool {
        ["penrose1", "penrose3", "penrose4"].iter().all(|n| self.passes(n))
    }

    pub fn merge(mut self, other: ResidualReport) -> Self {
        self.entries.extend(other.entries);
        self
    }
}

fn check_shapes(a: &Matrix, x: &Matrix) -> Result<()> {
    if x.shape() != (a.cols(), a.rows()) {
        return Err(Error::DimensionMismatch {
            context: "candidate inverse",
            expected: format!("{}x{}", a.cols(), a.rows()),
            found: format!("{}x{}", x.rows(), x.cols()),
        });
    }
    Ok(())
}

pub fn penrose_residuals(a: &Matrix, x: &Matrix, tol: &Tolerance) -> Result<ResidualReport> {
    check_shapes(a, x)?;
    let ax = a * x;
    let xa = x * a;
    let mut report = ResidualReport::new(tol.residual_abs);
    report.push("penrose1", (&ax * a).distance(a));
    report.push("penrose2", (&xa * x).distance(x));
    report.push("penrose3", ax.adjoint().distance(&ax));
    report.push("penrose4", xa.adjoint().distance(&xa));
    Ok(report)
}

/// Evaluates systems (i) to (vi); each entry holds the largest residual of
/// the system's equations. Null-space equalities are compared through their
/// orthogonal projectors.
pub fn characterization_residuals(a: &Matrix, x: &Matrix, tol: &Tolerance) -> Result<ResidualReport> {
    check_shapes(a, x)?;
    let pa = projectors(a, tol)?;
    let px = projectors(x, tol)?;
    let ah = a.adjoint();
    let ax = a * x;
    let xa = x * a;

    let ax_range = ax.distance(&pa.range);
    let xa_corange = xa.distance(&pa.corange);

    let sys = [
        ("char_i", ax_range.max(px.left_null.distance(&pa.null))),
        ("char_ii", ax_range.max(xa_corange).max((&xa * x).distance(x))),
        (
            "char_iii",
            (&(x * a) * &ah).distance(&ah).max((&(x * &x.adjoint()) * &ah).distance(x)),
        ),
        (
            "char_iv",
            (&xa * &pa.corange)
                .distance(&pa.corange)
                .max((x * &pa.left_null).frobenius_norm()),
        ),
        ("char_v", xa_corange.max(px.null.distance(&pa.left_null))),
        ("char_vi", ax_range.max(xa.distance(&px.range))),
    ];
    let mut report = ResidualReport::new(tol.residual_abs);
    for (name, r) in sys {
        report.push(name, r);
    }
    Ok(report)
}

/// Penrose and characterization residuals combined.
pub fn full_report(a: &Matrix, x: &Matrix, tol: &Tolerance) -> Result<ResidualReport> {
    Ok(penrose_residuals(a, x, tol)?.merge(characterization_residuals(a, x, tol)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::pinv_oracle;
    use crate::random::{random_matrix, seeded_rng};

    #[test]
    fn identity_passes_everything() {
        let tol = Tolerance::default();
        let i2 = Matrix::identity(2);
        let p = penrose_residuals(&i2, &i2, &tol).unwrap();
        assert!(p.entries.iter().all(|e| e.residual == 0.0));
        let i3 = Matrix::identity(3);
        assert!(characterization_residuals(&i3, &i3, &tol).unwrap().all_pass());
    }

    #[test]
    fn inverse_134_that_is_not_mpi() {
        let tol = Tolerance::default();
        let p = penrose_residuals(&Matrix::diag_real(&[1.0, 0.0]), &Matrix::diag_real(&[1.0, 5.0]), &tol).unwrap();
        assert!(!p.passes("penrose2"));
        assert!(p.is_134_inverse());
    }

    #[test]
    fn oracle_passes_on_random() {
        let tol = Tolerance::default();
        let mut rng = seeded_rng(4);
        let a = random_matrix(&mut rng, 4, 3);
        let x = pinv_oracle(&a, &tol).unwrap();
        assert!(penrose_residuals(&a, &x, &tol).unwrap().all_pass());
        let a = random_matrix(&mut rng, 5, 3);
        let x = pinv_oracle(&a, &tol).unwrap();
        assert!(characterization_residuals(&a, &x, &tol).unwrap().all_pass());
    }

    #[test]
    fn system_two_catches_non_reflexive() {
        let tol = Tolerance::default();
        let r = characterization_residuals(&Matrix::diag_real(&[1.0, 0.0]), &Matrix::identity(2), &tol).unwrap();
        assert!(!r.passes("char_ii"));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let tol = Tolerance::default();
        assert!(penrose_residuals(&Matrix::zeros(2, 3), &Matrix::zeros(2, 3), &tol).is_err());
    }
}
