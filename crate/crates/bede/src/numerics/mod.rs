//! Self-contained numerical kernel: adaptive quadrature, discrete summation,
//! incomplete gamma functions, multistart root solving, derivative-free
//! minimization, finite differences, and a small dense matrix type.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! many threads at once.

mod gamma;
mod matrix;
mod quad;
mod solve;

pub use gamma::{gamma, ln_gamma, lower_incomplete_gamma, upper_incomplete_gamma};
pub use matrix::{matrix_inverse, matrix_trace, Matrix};
pub use quad::{integrate, sum_discrete, QuadResult, SumResult, SupportSpec};
pub use solve::{
    damped_newton, finite_diff_jacobian, minimize, solve_multistart, ROOT_DEDUP_TOL,
};

/// Default absolute/relative tolerance for model integrals.
pub const QUAD_TOL: f64 = 1e-10;
/// Default residual tolerance for estimating-equation roots.
pub const SOLVER_TOL: f64 = 1e-9;
