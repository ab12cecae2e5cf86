use crate::error::{Error, Result};

/// Coordinate-format assembly buffer. Duplicate entries are allowed and are
/// summed when converted into a [`SparseMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct Triplets {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Triplets {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Triplets {
            nrows,
            ncols,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.entries.push((row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing inside each row. Every stored entry
/// is a structural nonzero, whatever its numeric value: products never drop
/// entries that happen to cancel to zero. Use [`SparseMatrix::prune`] to drop
/// small values explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, checking every structural invariant.
    pub fn from_csr(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != nrows + 1 {
            return Err(Error::InvalidStructure(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                nrows + 1
            )));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidStructure("row_ptr[0] must be 0".into()));
        }
        if col_idx.len() != values.len() || row_ptr[nrows] != col_idx.len() {
            return Err(Error::InvalidStructure(
                "row_ptr[nrows], col_idx and values disagree on nnz".into(),
            ));
        }
        for i in 0..nrows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidStructure(format!(
                    "row_ptr decreases at row {i}"
                )));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for (k, &c) in cols.iter().enumerate() {
                if c >= ncols {
                    return Err(Error::IndexOutOfRange {
                        row: i,
                        col: c,
                        nrows,
                        ncols,
                    });
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::InvalidStructure(format!(
                        "column indices of row {i} are not strictly increasing"
                    )));
                }
            }
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Caller guarantees the CSR invariants.
    pub(crate) fn from_csr_unchecked(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), nrows + 1);
        debug_assert_eq!(row_ptr[nrows], col_idx.len());
        debug_assert_eq!(col_idx.len(), values.len());
        SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Compacts a triplet list: rows sorted, duplicates summed.
    pub fn from_triplets(t: &Triplets) -> Result<Self> {
        let (nrows, ncols) = (t.nrows, t.ncols);
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in &t.entries {
            if r >= nrows || c >= ncols {
                return Err(Error::IndexOutOfRange {
                    row: r,
                    col: c,
                    nrows,
                    ncols,
                });
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        // bucket by row, then sort each row by column and merge duplicates
        let mut next = counts.clone();
        let mut cols = vec![0usize; t.entries.len()];
        let mut vals = vec![0.0f64; t.entries.len()];
        for &(r, c, v) in &t.entries {
            cols[next[r]] = c;
            vals[next[r]] = v;
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(t.entries.len());
        let mut values = Vec::with_capacity(t.entries.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for i in 0..nrows {
            scratch.clear();
            scratch.extend(
                cols[counts[i]..counts[i + 1]]
                    .iter()
                    .copied()
                    .zip(vals[counts[i]..counts[i + 1]].iter().copied()),
            );
            // stable sort keeps the summation order equal to input order
            scratch.sort_by_key(|&(c, _)| c);
            for &(c, v) in &scratch {
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseMatrix::from_csr_unchecked(
            nrows, ncols, row_ptr, col_idx, values,
        ))
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix::from_csr_unchecked(nrows, ncols, vec![0; nrows + 1], Vec::new(), Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        SparseMatrix::from_csr_unchecked(n, n, (0..=n).collect(), (0..n).collect(), diag.to_vec())
    }

    /// A single-row matrix holding the entries of `dense` that are not exactly zero.
    pub fn row_vector(dense: &[f64]) -> Self {
        let (cols, vals): (Vec<usize>, Vec<f64>) = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, *v))
            .unzip();
        SparseMatrix::from_csr_unchecked(1, dense.len(), vec![0, cols.len()], cols, vals)
    }

    /// A single-column matrix holding every entry of `dense`, zeros included.
    pub fn column_vector_full(dense: &[f64]) -> Self {
        let n = dense.len();
        SparseMatrix::from_csr_unchecked(n, 1, (0..=n).collect(), vec![0; n], dense.to_vec())
    }

    /// Builds a matrix from a dense row-major array, storing only nonzero values.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged dense input");
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix::from_csr_unchecked(nrows, ncols, row_ptr, col_idx, values)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn row_counts(&self) -> Vec<usize> {
        (0..self.nrows).map(|i| self.row_nnz(i)).collect()
    }

    pub fn col_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.ncols];
        for &c in &self.col_idx {
            counts[c] += 1;
        }
        counts
    }

    /// Stored value at (i, j), or `None` when the position is structurally empty.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn to_triplets(&self) -> Triplets {
        Triplets {
            nrows: self.nrows,
            ncols: self.ncols,
            entries: self.iter().collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.iter() {
            d[i][j] = v;
        }
        d
    }

    /// Same sparsity pattern (values ignored).
    pub fn same_pattern(&self, other: &SparseMatrix) -> bool {
        self.shape() == other.shape()
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Max absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.ncols];
        for (&j, &v) in self.col_idx.iter().zip(&self.values) {
            sums[j] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True when no stored entry has a nonzero value.
    pub fn is_numerically_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Drops entries with |value| <= eps.
    pub fn prune(&self, eps: f64) -> SparseMatrix {
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if v.abs() > eps {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix::from_csr_unchecked(self.nrows, self.ncols, row_ptr, col_idx, values)
    }

    pub fn scale(&self, alpha: f64) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_slice(&self, start: usize, end: usize) -> SparseMatrix {
        assert!(start <= end && end <= self.nrows);
        let base = self.row_ptr[start];
        let row_ptr = self.row_ptr[start..=end].iter().map(|p| p - base).collect();
        let range = base..self.row_ptr[end];
        SparseMatrix::from_csr_unchecked(
            end - start,
            self.ncols,
            row_ptr,
            self.col_idx[range.clone()].to_vec(),
            self.values[range].to_vec(),
        )
    }

    /// `B = A(row_perm, col_perm)` in the gather convention: row `k` of the result is
    /// row `row_perm[k]` of `self`, column `k` of the result is column `col_perm[k]`.
    pub fn permute(&self, row_perm: Option<&[usize]>, col_perm: Option<&[usize]>) -> SparseMatrix {
        let col_inv = col_perm.map(|q| {
            let mut inv = vec![0; q.len()];
            for (k, &j) in q.iter().enumerate() {
                inv[j] = k;
            }
            inv
        });
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for k in 0..self.nrows {
            let i = row_perm.map_or(k, |p| p[k]);
            let (cols, vals) = self.row(i);
            match &col_inv {
                None => {
                    col_idx.extend_from_slice(cols);
                    values.extend_from_slice(vals);
                }
                Some(inv) => {
                    scratch.clear();
                    scratch.extend(cols.iter().zip(vals).map(|(&j, &v)| (inv[j], v)));
                    scratch.sort_unstable_by_key(|&(j, _)| j);
                    for &(j, v) in &scratch {
                        col_idx.push(j);
                        values.push(v);
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix::from_csr_unchecked(self.nrows, self.ncols, row_ptr, col_idx, values)
    }

    /// Stacks blocks given row-major as `blocks[block_row][block_col]`; `None` is a zero block.
    /// Block heights and widths come from the first non-empty block of each block row/column.
    pub fn block(blocks: &[Vec<Option<&SparseMatrix>>]) -> Result<SparseMatrix> {
        let nbr = blocks.len();
        let nbc = blocks.first().map_or(0, |r| r.len());
        let mut heights = vec![None; nbr];
        let mut widths = vec![None; nbc];
        for (bi, brow) in blocks.iter().enumerate() {
            if brow.len() != nbc {
                return Err(Error::dims("block", "ragged block layout"));
            }
            for (bj, blk) in brow.iter().enumerate() {
                if let Some(m) = blk {
                    for (slot, val, what) in [
                        (&mut heights[bi], m.nrows, "height"),
                        (&mut widths[bj], m.ncols, "width"),
                    ] {
                        match slot {
                            None => *slot = Some(val),
                            Some(prev) if *prev != val => {
                                return Err(Error::dims(
                                    "block",
                                    format!("inconsistent block {what} at ({bi}, {bj})"),
                                ))
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        let heights: Vec<usize> = heights.into_iter().map(|h| h.unwrap_or(0)).collect();
        let widths: Vec<usize> = widths.into_iter().map(|w| w.unwrap_or(0)).collect();
        let mut col_off = vec![0; nbc + 1];
        for j in 0..nbc {
            col_off[j + 1] = col_off[j] + widths[j];
        }
        let nrows: usize = heights.iter().sum();
        let ncols = col_off[nbc];
        let nnz: usize = blocks.iter().flatten().flatten().map(|m| m.nnz()).sum();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for (bi, brow) in blocks.iter().enumerate() {
            for r in 0..heights[bi] {
                for (bj, blk) in brow.iter().enumerate() {
                    if let Some(m) = blk {
                        let (cols, vals) = m.row(r);
                        col_idx.extend(cols.iter().map(|&c| c + col_off[bj]));
                        values.extend_from_slice(vals);
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
        Ok(SparseMatrix::from_csr_unchecked(nrows, ncols, row_ptr, col_idx, values))
    }
}
