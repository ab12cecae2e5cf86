//! Structural analysis: product nonzero prediction, dense-row detection,
//! column elimination trees and symbolic fill bounds.
//!
//! Everything here looks at patterns only. Numerical cancellation is ignored,
//! so a position is "nonzero" whenever some path in the relevant graph reaches it.

use crate::error::{Error, Result};
use crate::sparse::{transpose, SparseMatrix};

/// Per-row and total nonzero counts of a product, predicted from the layered graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductNnz {
    pub row_counts: Vec<usize>,
    pub total: usize,
}

/// Row `i` of `a * b` has one nonzero per column vertex of `b` reachable from
/// row vertex `i` of `a` through the two stacked bipartite graphs.
pub fn predict_product_nnz(a: &SparseMatrix, b: &SparseMatrix) -> Result<ProductNnz> {
    if a.ncols() != b.nrows() {
        return Err(Error::dims(
            "predict_product_nnz",
            format!("{:?} * {:?}", a.shape(), b.shape()),
        ));
    }
    let mut reached = vec![usize::MAX; b.ncols()];
    let mut row_counts = Vec::with_capacity(a.nrows());
    for i in 0..a.nrows() {
        let mut count = 0;
        for &k in a.row(i).0 {
            for &j in b.row(k).0 {
                if reached[j] != i {
                    reached[j] = i;
                    count += 1;
                }
            }
        }
        row_counts.push(count);
    }
    let total = row_counts.iter().sum();
    Ok(ProductNnz { row_counts, total })
}

/// Rows and columns with more than `ceil(10 sqrt(n))` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    /// Row threshold, from the column dimension.
    pub threshold: usize,
    /// Column threshold, from the row dimension.
    pub col_threshold: usize,
    pub dense_rows: Vec<usize>,
    pub dense_cols: Vec<usize>,
}

impl DensityReport {
    pub fn is_empty(&self) -> bool {
        self.dense_rows.is_empty() && self.dense_cols.is_empty()
    }
}

pub fn dense_threshold(n: usize) -> usize {
    (10.0 * (n as f64).sqrt()).ceil() as usize
}

pub fn detect_dense_rows(a: &SparseMatrix) -> DensityReport {
    let threshold = dense_threshold(a.ncols());
    let col_threshold = dense_threshold(a.nrows());
    let dense_rows = (0..a.nrows())
        .filter(|&i| a.row_nnz(i) > threshold)
        .collect();
    let dense_cols = a
        .col_counts()
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > col_threshold)
        .map(|(j, _)| j)
        .collect();
    DensityReport {
        threshold,
        col_threshold,
        dense_rows,
        dense_cols,
    }
}

/// Elimination tree of `aᵀa`. Parents always have larger indices than their children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationTree {
    pub parent: Vec<Option<usize>>,
    /// Number of vertices on the longest leaf-to-root path.
    pub height: usize,
}

impl EliminationTree {
    pub fn from_parents(parent: Vec<Option<usize>>) -> Self {
        let n = parent.len();
        let mut depth = vec![1usize; n];
        let mut height = 0;
        for j in (0..n).rev() {
            if let Some(p) = parent[j] {
                debug_assert!(p > j);
                depth[j] = depth[p] + 1;
            }
            height = height.max(depth[j]);
        }
        EliminationTree { parent, height }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_none())
            .map(|(j, _)| j)
    }
}

/// Column elimination tree: the elimination tree of `aᵀa`, built row by row
/// with path-compressed ancestors so that `aᵀa` is never formed.
pub fn column_etree(a: &SparseMatrix) -> EliminationTree {
    let at = transpose(a);
    EliminationTree::from_parents(column_etree_parents(&at, a.nrows()))
}

/// `at` is the transpose of the analysed matrix, i.e. its column-major view.
fn column_etree_parents(at: &SparseMatrix, nrows: usize) -> Vec<Option<usize>> {
    let n = at.nrows();
    let mut parent = vec![None; n];
    let mut ancestor: Vec<Option<usize>> = vec![None; n];
    let mut prev: Vec<Option<usize>> = vec![None; nrows];
    for k in 0..n {
        for &row in at.row(k).0 {
            let mut node = prev[row];
            while let Some(i) = node {
                if i >= k {
                    break;
                }
                let next = ancestor[i];
                ancestor[i] = Some(k);
                if next.is_none() {
                    parent[i] = Some(k);
                }
                node = next;
            }
            prev[row] = Some(k);
        }
    }
    parent
}

/// Structural counts behind [`symbolic_fill_bound`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicCounts {
    pub etree: EliminationTree,
    /// Nonzeros of the Cholesky factor of `aᵀa` (the R of a QR factorization).
    pub r_nnz: usize,
    /// Nonzeros of the Householder vectors V of a QR factorization.
    pub v_nnz: usize,
}

impl SymbolicCounts {
    /// Upper bound on |L| + |U| for LU with partial pivoting: `U ⊆ R`, `L ⊆ V`,
    /// with the shared diagonal counted once.
    pub fn lu_bound(&self) -> usize {
        self.r_nnz + self.v_nnz - self.etree.len()
    }
}

/// Computes the etree, |R| and |V| of `a`.
///
/// |R| is accumulated by walking each row subtree of the etree, so the cost is
/// proportional to |R| itself; a full row makes this quadratic in the number
/// of columns, like any symbolic factorization that materializes `aᵀa`'s factor.
pub fn symbolic_counts(a: &SparseMatrix) -> SymbolicCounts {
    let (m, n) = a.shape();
    let at = transpose(a);
    let parent = column_etree_parents(&at, m);

    // leftmost column of every row; rows are sorted so it is the first entry
    let leftmost: Vec<Option<usize>> = (0..m).map(|i| a.row(i).0.first().copied()).collect();

    // In the etree of aᵀa all columns of one row lie on a single root path, so
    // the row subtree of column i is spanned by paths from leftmost(r) for the
    // rows r that touch column i.
    let mut mark = vec![usize::MAX; n];
    let mut r_nnz = n;
    for i in 0..n {
        mark[i] = i;
        for &row in at.row(i).0 {
            let mut k = leftmost[row].expect("row with an entry has a leftmost column");
            while mark[k] != i {
                mark[k] = i;
                r_nnz += 1;
                match parent[k] {
                    Some(p) => k = p,
                    None => break,
                }
            }
        }
    }

    // Householder vector counts: rows enter at their leftmost column, one row
    // becomes the pivot, the remainder move on to the etree parent.
    let mut queued = vec![0usize; n];
    for &l in leftmost.iter().flatten() {
        queued[l] += 1;
    }
    let mut v_nnz = 0;
    for k in 0..n {
        let rows = queued[k];
        v_nnz += rows.max(1);
        if rows > 1 {
            if let Some(p) = parent[k] {
                queued[p] += rows - 1;
            }
        }
    }

    SymbolicCounts {
        etree: EliminationTree::from_parents(parent),
        r_nnz,
        v_nnz,
    }
}

/// Upper bound on |L + U| for `a` under partial pivoting, from the QR structure
/// (|R| + |V| with the diagonal counted once).
pub fn symbolic_fill_bound(a: &SparseMatrix) -> usize {
    symbolic_counts(a).lu_bound()
}
