use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Unit roundoff of IEEE double precision.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON;

/// Numerical-rank and verification thresholds.
///
/// A singular value counts as nonzero when it exceeds
/// `rank_rel * sigma_max * max(rows, cols)`. Verification residuals pass when
/// they are at most `residual_abs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rank_rel: f64,
    pub residual_abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_rel: UNIT_ROUNDOFF,
            residual_abs: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, residual_abs: f64) -> Result<Self> {
        if !(rank_rel > 0.0 && rank_rel.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rank_rel must be positive, got {rank_rel}"
            )));
        }
        if !(residual_abs > 0.0 && residual_abs.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "residual_abs must be positive, got {residual_abs}"
            )));
        }
        Ok(Self {
            rank_rel,
            residual_abs,
        })
    }

    pub fn with_residual(self, residual_abs: f64) -> Self {
        Self {
            residual_abs,
            ..self
        }
    }

    /// Residual bound scaled by `max(1, ‖a‖_F)`.
    pub fn scaled_for(self, a: &Matrix) -> Self {
        self.with_residual(self.residual_abs * a.frobenius_norm().max(1.0))
    }

    /// Singular-value cutoff for a `rows x cols` matrix with largest
    /// singular value `sigma_max`.
    pub fn rank_cutoff(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        self.rank_rel * sigma_max * rows.max(cols) as f64
    }
}
