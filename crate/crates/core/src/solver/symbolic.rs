use crate::error::{Error, Result};
use crate::graph::{dense_threshold, symbolic_counts, EliminationTree};
use crate::sparse::{transpose, SparseMatrix};

/// Output of the symbolic phase: a fill-reducing column order and the
/// structure predicted for the factors under that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicPlan {
    /// `col_perm[k]` is the original column eliminated at step `k`.
    pub col_perm: Vec<usize>,
    /// Column elimination tree of the column-permuted matrix.
    pub etree: EliminationTree,
    /// Upper bound on |L + U| under partial pivoting.
    pub predicted_fill: usize,
}

/// Symbolic analysis of a square matrix.
///
/// Columns with more than `10 sqrt(n)` entries are held back and ordered
/// last. The remaining columns are ordered by approximate minimum degree on
/// the pattern of `SᵀS`, where `S` is the matrix with dense rows and dense
/// columns removed. The elimination tree and the fill bound are then computed
/// for the permuted matrix, dense rows included.
pub fn symbolic(a: &SparseMatrix) -> Result<SymbolicPlan> {
    if a.nrows() != a.ncols() {
        return Err(Error::dims("symbolic", format!("matrix is {:?}", a.shape())));
    }
    let col_perm = column_order(a);
    let permuted = a.permute(None, Some(&col_perm));
    let counts = symbolic_counts(&permuted);
    let predicted_fill = counts.lu_bound();
    Ok(SymbolicPlan {
        col_perm,
        etree: counts.etree,
        predicted_fill,
    })
}

fn column_order(a: &SparseMatrix) -> Vec<usize> {
    let n = a.ncols();
    let row_limit = dense_threshold(n);
    let col_limit = dense_threshold(a.nrows());
    let col_counts = a.col_counts();

    let dense_col: Vec<bool> = col_counts.iter().map(|&c| c > col_limit).collect();
    let dense_row: Vec<bool> = (0..a.nrows()).map(|i| a.row_nnz(i) > row_limit).collect();

    // compress the sparse columns to 0..ns
    let mut local = vec![usize::MAX; n];
    let mut sparse_cols = Vec::with_capacity(n);
    for j in 0..n {
        if !dense_col[j] {
            local[j] = sparse_cols.len();
            sparse_cols.push(j);
        }
    }
    let ns = sparse_cols.len();

    let mut order: Vec<usize> = if ns == 0 {
        Vec::new()
    } else {
        // pattern of SᵀS: column j is adjacent to every column sharing a sparse row
        let at = transpose(a);
        let mut mark = vec![usize::MAX; ns];
        let mut col_ptr: Vec<i64> = Vec::with_capacity(ns + 1);
        let mut row_idx: Vec<i64> = Vec::new();
        col_ptr.push(0);
        let mut scratch = Vec::new();
        for (lj, &j) in sparse_cols.iter().enumerate() {
            scratch.clear();
            mark[lj] = lj;
            scratch.push(lj);
            for &r in at.row(j).0 {
                if dense_row[r] {
                    continue;
                }
                for &c in a.row(r).0 {
                    let lc = local[c];
                    if lc != usize::MAX && mark[lc] != lj {
                        mark[lc] = lj;
                        scratch.push(lc);
                    }
                }
            }
            scratch.sort_unstable();
            row_idx.extend(scratch.iter().map(|&i| i as i64));
            col_ptr.push(row_idx.len() as i64);
        }
        match amd::order::<i64>(ns as i64, &col_ptr, &row_idx, &amd::Control::default()) {
            Ok((perm, _, _)) => perm.into_iter().map(|k| sparse_cols[k as usize]).collect(),
            // the pattern above is valid by construction; keep the natural order if not
            Err(_) => sparse_cols.clone(),
        }
    };
    order.extend((0..n).filter(|&j| dense_col[j]));
    order
}
