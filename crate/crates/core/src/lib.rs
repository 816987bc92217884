//! Moore-Penrose pseudoinverses that exploit structure: orthogonal sums,
//! rank completion, circulant matrices and graph distance matrices. Every
//! structured path can be checked against an SVD reference.

pub mod circulant;
pub mod error;
pub mod graphdist;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod oracle;
pub mod random;
pub mod sumdecomp;
pub mod svd;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{Matrix, C64};
pub use oracle::{pinv_normal_equations, pinv_oracle, projectors, Projectors};
pub use svd::{svd, SvdFactorization};
pub use tolerance::Tolerance;
pub use verify::{characterization_residuals, penrose_residuals, ResidualReport};
