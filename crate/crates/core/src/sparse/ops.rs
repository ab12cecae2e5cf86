//! Arithmetic kernels over [`SparseMatrix`].

use super::SparseMatrix;
use crate::error::{Error, Result};

/// Transpose by counting sort on column indices. Output rows come out sorted.
pub fn transpose(a: &SparseMatrix) -> SparseMatrix {
    let (m, n) = a.shape();
    let mut row_ptr = vec![0usize; n + 1];
    for &j in a.col_idx() {
        row_ptr[j + 1] += 1;
    }
    for j in 0..n {
        row_ptr[j + 1] += row_ptr[j];
    }
    let mut next = row_ptr.clone();
    let mut col_idx = vec![0usize; a.nnz()];
    let mut values = vec![0.0; a.nnz()];
    for i in 0..m {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let p = next[j];
            col_idx[p] = i;
            values[p] = v;
            next[j] += 1;
        }
    }
    SparseMatrix::from_csr_unchecked(n, m, row_ptr, col_idx, values)
}

/// Sparse product `a * b` (row-by-row Gustavson with a dense accumulator).
///
/// Every position reachable through the layered graph of the product is
/// stored, even when its value sums to exactly zero.
pub fn spgemm(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    if a.ncols() != b.nrows() {
        return Err(Error::dims(
            "spgemm",
            format!("{:?} * {:?}", a.shape(), b.shape()),
        ));
    }
    let (m, p) = (a.nrows(), b.ncols());
    let mut marker = vec![usize::MAX; p];
    let mut acc = vec![0.0f64; p];
    let mut row_ptr = Vec::with_capacity(m + 1);
    let mut col_idx = Vec::with_capacity(a.nnz().max(b.nnz()));
    let mut values = Vec::with_capacity(a.nnz().max(b.nnz()));
    row_ptr.push(0);
    for i in 0..m {
        let start = col_idx.len();
        let (acols, avals) = a.row(i);
        for (&k, &av) in acols.iter().zip(avals) {
            let (bcols, bvals) = b.row(k);
            for (&j, &bv) in bcols.iter().zip(bvals) {
                if marker[j] != i {
                    marker[j] = i;
                    acc[j] = av * bv;
                    col_idx.push(j);
                } else {
                    acc[j] += av * bv;
                }
            }
        }
        col_idx[start..].sort_unstable();
        values.extend(col_idx[start..].iter().map(|&j| acc[j]));
        row_ptr.push(col_idx.len());
    }
    Ok(SparseMatrix::from_csr_unchecked(m, p, row_ptr, col_idx, values))
}

/// `a * b * c`, evaluated left to right.
pub fn triple_product(a: &SparseMatrix, b: &SparseMatrix, c: &SparseMatrix) -> Result<SparseMatrix> {
    spgemm(&spgemm(a, b)?, c)
}

/// `alpha * a + beta * b`; the pattern is the union of both patterns.
pub fn add(alpha: f64, a: &SparseMatrix, beta: f64, b: &SparseMatrix) -> Result<SparseMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::dims("add", format!("{:?} + {:?}", a.shape(), b.shape())));
    }
    let (m, n) = a.shape();
    let mut row_ptr = Vec::with_capacity(m + 1);
    let mut col_idx = Vec::with_capacity(a.nnz() + b.nnz());
    let mut values = Vec::with_capacity(a.nnz() + b.nnz());
    row_ptr.push(0);
    for i in 0..m {
        let (ac, av) = a.row(i);
        let (bc, bv) = b.row(i);
        let (mut p, mut q) = (0, 0);
        while p < ac.len() || q < bc.len() {
            let take_a = q == bc.len() || (p < ac.len() && ac[p] <= bc[q]);
            let take_b = p == ac.len() || (q < bc.len() && bc[q] <= ac[p]);
            if take_a && take_b {
                col_idx.push(ac[p]);
                values.push(alpha * av[p] + beta * bv[q]);
                p += 1;
                q += 1;
            } else if take_a {
                col_idx.push(ac[p]);
                values.push(alpha * av[p]);
                p += 1;
            } else {
                col_idx.push(bc[q]);
                values.push(beta * bv[q]);
                q += 1;
            }
        }
        row_ptr.push(col_idx.len());
    }
    Ok(SparseMatrix::from_csr_unchecked(m, n, row_ptr, col_idx, values))
}

/// `a * x`, accumulating each row in ascending column order.
pub fn spmv(a: &SparseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.ncols() {
        return Err(Error::dims(
            "spmv",
            format!("matrix has {} columns, vector has length {}", a.ncols(), x.len()),
        ));
    }
    Ok((0..a.nrows())
        .map(|i| {
            let (cols, vals) = a.row(i);
            cols.iter().zip(vals).fold(0.0, |s, (&j, &v)| s + v * x[j])
        })
        .collect())
}

/// `aᵀ * x` without forming the transpose.
pub fn spmv_transpose(a: &SparseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.nrows() {
        return Err(Error::dims(
            "spmv_transpose",
            format!("matrix has {} rows, vector has length {}", a.nrows(), x.len()),
        ));
    }
    let mut y = vec![0.0; a.ncols()];
    for (i, &xi) in x.iter().enumerate() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            y[j] += v * xi;
        }
    }
    Ok(y)
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_product_is_bit_identical() {
        let a = SparseMatrix::from_dense(&[vec![1.5, 0.0, -2.0], vec![0.0, 0.0, 3.25]]);
        let c = spgemm(&SparseMatrix::identity(2), &a).unwrap();
        assert_eq!(c, a);
    }

    #[test]
    fn cancellation_keeps_explicit_zero() {
        let a = SparseMatrix::row_vector(&[1.0, 1.0]);
        let b = SparseMatrix::from_dense(&[vec![1.0], vec![-1.0]]);
        let c = spgemm(&a, &b).unwrap();
        assert_eq!(c.nnz(), 1);
        assert_eq!(c.get(0, 0), Some(0.0));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = SparseMatrix::identity(2);
        let b = SparseMatrix::identity(3);
        assert!(spgemm(&a, &b).is_err());
        assert!(spmv(&a, &[1.0]).is_err());
        assert!(spmv_transpose(&a, &[1.0, 2.0, 3.0]).is_err());
        assert!(add(1.0, &a, 1.0, &b).is_err());
    }

    #[test]
    fn zero_matrix_times_vector() {
        let z = SparseMatrix::zeros(3, 2);
        assert_eq!(spmv(&z, &[4.0, 5.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn transpose_of_diagonal_is_itself() {
        let d = SparseMatrix::from_diagonal(&[1.0, -2.0, 3.0]);
        assert_eq!(transpose(&d), d);
    }

    #[test]
    fn add_merges_patterns() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
        let b = SparseMatrix::from_dense(&[vec![0.0, 1.0], vec![0.0, 1.0]]);
        let c = add(1.0, &a, -1.0, &b).unwrap();
        assert_eq!(c.to_dense(), vec![vec![1.0, -1.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn spmv_transpose_matches_transposed_spmv() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 0.0, 2.0], vec![0.0, 3.0, 4.0]]);
        let x = [1.0, -1.0];
        assert_eq!(
            spmv_transpose(&a, &x).unwrap(),
            spmv(&transpose(&a), &x).unwrap()
        );
    }
}
