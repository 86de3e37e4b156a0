//! Dense kernels for equality-constrained Newton steps: KKT assembly and
//! solve, closed-form affine projection, orthonormal null-space bases and the
//! reduced (null-space) Newton step.

mod affine;
mod cholesky;
mod kkt;
mod ldlt;
mod matrix;
mod qr;

pub use affine::{null_space_basis, project_affine, reduced_newton_step};
pub use cholesky::{Cholesky, Lu};
pub use kkt::{solve_kkt, KktSolution, KktSystem};
pub(crate) use kkt::solve_block as kkt_solve_block;
pub use ldlt::Ldlt;
pub use matrix::{add, axpy, distance, dot, norm, sub, Matrix};
pub use qr::HouseholderQr;

/// Reciprocal condition estimates below this are treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-12;
