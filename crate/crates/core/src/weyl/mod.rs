//! Exact algebra of normal-ordered differential operators.

pub mod checks;
pub mod fourier;
pub mod linalg;
pub mod poly;
pub mod scalar;

pub use checks::{
    casimir, check_homomorphism, fit_cartan, verify_leibniz_v0, verify_u_decomposition, DecompositionReport,
    HomomorphismReport, LeibnizReport,
};
pub use poly::{var_set, OperatorPoly, VarSet, WeylMonomial};
pub use scalar::Scalar;

pub use crate::models::catalog::realize;
