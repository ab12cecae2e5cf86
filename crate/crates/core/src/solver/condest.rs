//! Hager's 1-norm estimate of `‖A⁻¹‖₁` from an existing LU factorization.

use super::LuFactors;
use crate::error::Result;
use crate::sparse::SparseMatrix;

const MAX_SWEEPS: usize = 5;

/// Lower bound on `‖A⁻¹‖₁`, usually exact or close to it.
///
/// Each sweep costs one solve with `A` and one with `Aᵀ`.
pub fn inverse_norm1_estimate(lu: &LuFactors) -> Result<f64> {
    let n = lu.n();
    if n == 0 {
        return Ok(0.0);
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut y = lu.solve(&x)?;
    // ‖x‖₁ is 1 up to rounding; dividing keeps the identity estimate exact
    let mut est = norm1(&y) / norm1(&x);
    for _ in 0..MAX_SWEEPS {
        let xi: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = lu.solve_transpose(&xi)?;
        let (j, zj) = z
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zj <= ztx {
            break;
        }
        x.iter_mut().for_each(|v| *v = 0.0);
        x[j] = 1.0;
        y = lu.solve(&x)?;
        let next = norm1(&y);
        if next <= est {
            break;
        }
        est = next;
    }
    Ok(est)
}

/// `‖A‖₁ · est(‖A⁻¹‖₁)`.
pub fn condest(a: &SparseMatrix, lu: &LuFactors) -> Result<f64> {
    Ok(a.norm_one() * inverse_norm1_estimate(lu)?)
}

fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{factorize, symbolic, DEFAULT_PIVOT_TOL};

    fn estimate(a: &SparseMatrix) -> f64 {
        let lu = factorize(a, &symbolic(a).unwrap(), DEFAULT_PIVOT_TOL).unwrap();
        condest(a, &lu).unwrap()
    }

    #[test]
    fn identity_is_perfectly_conditioned() {
        assert_eq!(estimate(&SparseMatrix::identity(7)), 1.0);
    }

    #[test]
    fn diagonal_estimate_is_exact() {
        let d = SparseMatrix::from_diagonal(&[1.0, 1e-3, 10.0, 2.0]);
        assert!((estimate(&d) - 1e4).abs() < 1e-9);
    }

    #[test]
    fn two_by_two_matches_closed_form() {
        // inverse is [[3, -1], [-5, 2]], ‖A‖₁ = 7, ‖A⁻¹‖₁ = 8
        let a = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![5.0, 3.0]]);
        assert!((estimate(&a) - 56.0).abs() < 1e-10);
    }
}
