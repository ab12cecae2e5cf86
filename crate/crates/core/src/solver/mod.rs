//! Sparse direct solver: symbolic analysis, left-looking LU, triangular
//! solves, condition estimation, and a dense reference solver for testing.

pub mod condest;
pub mod dense;
mod lu;
mod symbolic;

pub use condest::condest;
pub use dense::dense_oracle_solve;
pub use lu::{factorize, LuFactors, DEFAULT_PIVOT_TOL, MAX_GROWTH};
pub use symbolic::{symbolic, SymbolicPlan};

use crate::error::Result;
use crate::sparse::SparseMatrix;

/// Symbolic analysis, factorization and one solve.
pub fn sparse_solve(a: &SparseMatrix, b: &[f64], pivot_tol: f64) -> Result<Vec<f64>> {
    let plan = symbolic(a)?;
    factorize(a, &plan, pivot_tol)?.solve(b)
}
