//! Dense reference computations for small problems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Largest order accepted by [`dense_oracle_solve`].
pub const DENSE_SOLVE_LIMIT: usize = 2000;

pub fn to_dmatrix(a: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.iter() {
        d[(i, j)] = v;
    }
    d
}

/// Solves `a x = b` with dense LU and partial pivoting.
pub fn dense_oracle_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::dims(
            "dense_oracle_solve",
            format!("matrix {:?}, rhs of length {}", a.shape(), b.len()),
        ));
    }
    if n > DENSE_SOLVE_LIMIT {
        return Err(Error::DeskScaleOnly {
            size: n,
            limit: DENSE_SOLVE_LIMIT,
        });
    }
    let lu = to_dmatrix(a).lu();
    let u = lu.u();
    if let Some(k) = (0..n).find(|&k| u[(k, k)] == 0.0) {
        return Err(Error::SingularMatrix { column: k });
    }
    lu.solve(&DVector::from_column_slice(b))
        .map(|x| x.as_slice().to_vec())
        .ok_or(Error::SingularMatrix { column: n.saturating_sub(1) })
}

/// Numerical rank from the singular values, with the usual
/// `max(m, n) · ε · σ_max` cutoff.
pub fn dense_rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    let tol = a.nrows().max(a.ncols()) as f64 * f64::EPSILON * smax;
    sv.iter().filter(|&&s| s > tol).count()
}

/// 2-norm condition number `σ_max / σ_min` of a square matrix.
pub fn dense_condition(a: &DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    sv.max() / sv.min()
}
