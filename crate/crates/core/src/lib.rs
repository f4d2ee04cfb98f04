//! Sparsity-promoting Tikhonov regularization for linear inverse problems.
//!
//! The `ℓ¹`-penalized functional `‖Ax − y^δ‖² + α‖x‖₁` is minimized either
//! directly (ISTA, FISTA) or through the substitution `x = N(x̃)`,
//! `N(x̃)_k = sgn(x̃_k)·x̃_k²`, which turns it into the smooth
//! `‖A N(x̃) − y^δ‖² + α‖x̃‖²`. A C² surrogate `N_ε` of the transform makes
//! Newton's method applicable. The [`tomo`] module provides parallel-beam CT
//! test problems.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

pub mod error;
pub mod functionals;
pub mod linalg;
mod scalar;
pub mod solvers;
pub mod tomo;
pub mod transform;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SparseMatrix64 = linalg::SparseMatrix<f64>;
pub type SparseMatrix32 = linalg::SparseMatrix<f32>;
pub type DiagonalOperator64 = linalg::DiagonalOperator<f64>;
pub type TransformSpec64 = transform::TransformSpec<f64>;
pub type TransformSpec32 = transform::TransformSpec<f32>;
pub type ProblemData64 = functionals::ProblemData<f64>;
pub type ProblemData32 = functionals::ProblemData<f32>;
pub type SolverConfig64 = solvers::SolverConfig<f64>;
pub type SolverConfig32 = solvers::SolverConfig<f32>;
pub type Solution64 = solvers::Solution<f64>;
pub type IterationTrace64 = solvers::IterationTrace<f64>;
pub type ProblemInstance64 = tomo::ProblemInstance<f64>;
