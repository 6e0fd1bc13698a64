//! Krylov solvers (CG, MINRES) and a dense direct solver.

mod dense;
mod krylov;

use thiserror::Error;

pub use dense::{dense_oracle_solve, DenseMatrix, Lu};
pub use krylov::{cg_solve, minres_solve};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },
    #[error("vector length {got} does not match operator size {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is numerically singular (pivot {pivot:e} in column {column})")]
    Singular { column: usize, pivot: f64 },
}

/// A square linear operator `y = A x`.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// Overwrites `y` with `A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Main diagonal, used by the Jacobi preconditioner.
    fn diagonal(&self) -> Vec<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Preconditioner {
    #[default]
    None,
    /// Scaling by `1/|a_ii|`; rows with a zero diagonal are left unscaled.
    Jacobi,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_iter: usize,
    pub preconditioner: Preconditioner,
}

impl Default for SolverConfig {
    /// rtol 1e-6, atol 1e-10, 10000 iterations, no preconditioner.
    fn default() -> Self {
        SolverConfig { rtol: 1e-6, atol: 1e-10, max_iter: 10_000, preconditioner: Preconditioner::None }
    }
}

impl SolverConfig {
    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    /// Residual norm below which a solve counts as converged.
    pub fn threshold(&self, rhs_norm: f64) -> f64 {
        (self.rtol * rhs_norm).max(self.atol)
    }
}

/// Which condition ended the iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopCriterion {
    RelativeTolerance,
    AbsoluteTolerance,
    MaxIterations,
    /// The Krylov recurrence broke down before reaching the tolerance.
    Breakdown,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// True residual ‖b − A x‖₂ of the returned iterate.
    pub final_residual: f64,
    pub criterion: StopCriterion,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// ‖b − A x‖₂.
pub fn residual_norm(op: &dyn LinearOperator, b: &[f64], x: &[f64]) -> f64 {
    let mut ax = vec![0.0; op.dim()];
    op.apply(x, &mut ax);
    ax.iter().zip(b).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
}
