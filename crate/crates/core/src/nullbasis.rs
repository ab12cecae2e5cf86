//! Sparse null-space bases for short, wide constraint blocks.
//!
//! For a single row `b` the bidiagonal basis pairs consecutive numerical
//! nonzeros of `b`: a pair `(b_i, b_j)` produces a column with `1` at `i` and
//! `-b_i / b_j` at `j`. Every row and column of the basis then holds at most
//! two entries. Several rows are handled by nesting, one row at a time.

use crate::error::{Error, Result};
use crate::solver::{condest, factorize, symbolic, DEFAULT_PIVOT_TOL};
use crate::sparse::{spgemm, transpose, triple_product, SparseMatrix, Triplets};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Consecutive-nonzero pairing on one row.
    Bidiagonal,
    /// Product of bidiagonal factors, one per constraint row.
    Nested,
    /// Identity plus one pivot row, `z[p, j] = -b_j / b_p`.
    Fundamental,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullBasis {
    /// `n x (n - m)`.
    pub z: SparseMatrix,
    /// Signed off-identity entries in order of creation.
    pub pivot_ratios: Vec<f64>,
    /// Largest `|ratio|`, 0 when there is none.
    pub max_abs_ratio: f64,
    pub kind: BasisKind,
    /// Columns have been scaled to unit 2-norm.
    pub normalized: bool,
}

impl NullBasis {
    fn new(z: SparseMatrix, pivot_ratios: Vec<f64>, kind: BasisKind) -> Self {
        let max_abs_ratio = pivot_ratios.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        NullBasis {
            z,
            pivot_ratios,
            max_abs_ratio,
            kind,
            normalized: false,
        }
    }

    pub fn nrows(&self) -> usize {
        self.z.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.z.ncols()
    }

    pub fn nnz(&self) -> usize {
        self.z.nnz()
    }

    /// Scales every column to unit 2-norm. The pattern is unchanged.
    pub fn normalize_columns(&self) -> NullBasis {
        let mut sq = vec![0.0f64; self.z.ncols()];
        for (_, j, v) in self.z.iter() {
            sq[j] += v * v;
        }
        let mut t = Triplets::with_capacity(self.z.nrows(), self.z.ncols(), self.z.nnz());
        for (i, j, v) in self.z.iter() {
            let s = sq[j].sqrt();
            t.push(i, j, if s > 0.0 { v / s } else { v });
        }
        NullBasis {
            z: SparseMatrix::from_triplets(&t).expect("indices taken from a valid matrix"),
            normalized: true,
            ..self.clone()
        }
    }
}

/// Construction options shared by the saddle-point drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisOptions {
    /// Entries with `|v| <= eps` are treated as zero.
    pub eps: f64,
    pub normalize_columns: bool,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions {
            eps: 0.0,
            normalize_columns: false,
        }
    }
}

/// Bidiagonal basis for one row, or the nested basis for several.
pub fn construct(b: &SparseMatrix, opts: &BasisOptions) -> Result<NullBasis> {
    let basis = construct_multi(b, opts.eps)?;
    Ok(if opts.normalize_columns {
        basis.normalize_columns()
    } else {
        basis
    })
}

/// Bidiagonal null basis of the `1 x n` row `b`.
pub fn construct_single(b: &SparseMatrix, eps: f64) -> Result<NullBasis> {
    if b.nrows() != 1 {
        return Err(Error::dims(
            "construct_single",
            format!("expected a single row, got {:?}", b.shape()),
        ));
    }
    let (cols, vals) = b.row(0);
    let (z, ratios) = bidiagonal(b.ncols(), cols, vals, eps)?;
    Ok(NullBasis::new(z, ratios, BasisKind::Bidiagonal))
}

/// Convenience wrapper over [`construct_single`] for a dense row.
pub fn construct_single_dense(b: &[f64], eps: f64) -> Result<NullBasis> {
    construct_single(&SparseMatrix::row_vector(b), eps)
}

fn bidiagonal(n: usize, cols: &[usize], vals: &[f64], eps: f64) -> Result<(SparseMatrix, Vec<f64>)> {
    if n < 2 {
        return Err(Error::dims("null basis", format!("row length {n} < 2")));
    }
    let nz: Vec<(usize, f64)> = cols
        .iter()
        .zip(vals)
        .filter(|(_, v)| v.abs() > eps)
        .map(|(&j, &v)| (j, v))
        .collect();
    let Some(&(last, _)) = nz.last() else {
        return Err(Error::ZeroRow);
    };

    // ratio entering row p_{s+1} in column p_s
    let mut incoming: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut ratios = Vec::with_capacity(nz.len().saturating_sub(1));
    for w in nz.windows(2) {
        let ((i, bi), (j, bj)) = (w[0], w[1]);
        let r = -bi / bj;
        incoming[j] = Some((i, r));
        ratios.push(r);
    }

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(n + nz.len());
    let mut values = Vec::with_capacity(n + nz.len());
    row_ptr.push(0);
    for (r, inc) in incoming.iter().enumerate() {
        if let Some((c, v)) = *inc {
            col_idx.push(c);
            values.push(v);
        }
        if r < last {
            col_idx.push(r);
            values.push(1.0);
        } else if r > last {
            col_idx.push(r - 1);
            values.push(1.0);
        }
        row_ptr.push(col_idx.len());
    }
    let z = SparseMatrix::from_csr_unchecked(n, n - 1, row_ptr, col_idx, values);
    Ok((z, ratios))
}

/// Nested basis for an `m x n` block: `Z = Z_1 Z_2 ... Z_m`, where `Z_i`
/// is the bidiagonal basis of row `i` restricted to the null space built so far.
///
/// A single row gives exactly the bidiagonal basis.
pub fn construct_multi(b: &SparseMatrix, eps: f64) -> Result<NullBasis> {
    let (m, n) = b.shape();
    if m == 0 || m >= n {
        return Err(Error::dims(
            "construct_multi",
            format!("need 1 <= m < n, got {m} x {n}"),
        ));
    }
    if m == 1 {
        return construct_single(b, eps);
    }
    let mut ratios = Vec::new();
    let mut z: Option<SparseMatrix> = None;
    for i in 0..m {
        let bi = b.row_slice(i, i + 1);
        let row = match &z {
            None => bi,
            Some(z) => spgemm(&bi, z)?,
        };
        let (cols, vals) = row.row(0);
        let (zi, r) = match bidiagonal(row.ncols(), cols, vals, eps) {
            Ok(out) => out,
            Err(Error::ZeroRow) => return Err(Error::RankDeficiency { row: i }),
            Err(e) => return Err(e),
        };
        ratios.extend(r);
        z = Some(match z {
            None => zi,
            Some(z) => spgemm(&z, &zi)?,
        });
    }
    Ok(NullBasis::new(z.expect("m >= 2"), ratios, BasisKind::Nested))
}

/// A vector `x` with `k x = g`.
///
/// Row `i` is satisfied on the null space of rows `0..i`, so earlier rows stay
/// satisfied. On each restricted row the first numerical nonzero carries the
/// whole right-hand side. `g = 0` gives the zero vector.
pub fn particular_solution(k: &SparseMatrix, g: &[f64], eps: f64) -> Result<Vec<f64>> {
    let (m, n) = k.shape();
    if g.len() != m {
        return Err(Error::dims(
            "particular_solution",
            format!("{m} rows but rhs of length {}", g.len()),
        ));
    }
    let mut x = vec![0.0; n];
    if g.iter().all(|&v| v == 0.0) {
        return Ok(x);
    }
    let mut z: Option<SparseMatrix> = None;
    for i in 0..m {
        let ki = k.row_slice(i, i + 1);
        let (kc, kv) = ki.row(0);
        let r = g[i] - kc.iter().zip(kv).map(|(&j, &v)| v * x[j]).sum::<f64>();
        let row = match &z {
            None => ki.clone(),
            Some(z) => spgemm(&ki, z)?,
        };
        let (cols, vals) = row.row(0);
        match cols.iter().zip(vals).find(|(_, v)| v.abs() > eps) {
            Some((&j, &v)) => {
                let w = r / v;
                match &z {
                    None => x[j] += w,
                    Some(z) => {
                        for (p, _, zv) in z.iter().filter(|&(_, c, _)| c == j) {
                            x[p] += w * zv;
                        }
                    }
                }
            }
            None if r != 0.0 => return Err(Error::InconsistentConstraint { row: i }),
            None => {}
        }
        if i + 1 < m {
            let (zi, _) = match bidiagonal(row.ncols(), cols, vals, eps) {
                Ok(out) => out,
                Err(Error::ZeroRow) => return Err(Error::RankDeficiency { row: i }),
                Err(e) => return Err(e),
            };
            z = Some(match z {
                None => zi,
                Some(z) => spgemm(&z, &zi)?,
            });
        }
    }
    Ok(x)
}

/// Fundamental basis of a single row: identity on the non-pivot indices with
/// the pivot row holding `-b_j / b_pivot`.
pub fn fundamental_basis(b: &SparseMatrix, pivot: usize) -> Result<NullBasis> {
    let n = b.ncols();
    if b.nrows() != 1 || n < 2 {
        return Err(Error::dims(
            "fundamental_basis",
            format!("expected a single row of length >= 2, got {:?}", b.shape()),
        ));
    }
    if pivot >= n {
        return Err(Error::IndexOutOfRange {
            row: 0,
            col: pivot,
            nrows: 1,
            ncols: n,
        });
    }
    let bp = b.get(0, pivot).unwrap_or(0.0);
    if bp == 0.0 {
        return Err(Error::ZeroPivot { index: pivot });
    }
    let col_of = |j: usize| if j < pivot { j } else { j - 1 };
    let (cols, vals) = b.row(0);
    let mut t = Triplets::with_capacity(n, n - 1, n + cols.len());
    let mut ratios = Vec::with_capacity(cols.len());
    for (&j, &v) in cols.iter().zip(vals) {
        if j != pivot && v != 0.0 {
            let r = -v / bp;
            t.push(pivot, col_of(j), r);
            ratios.push(r);
        }
    }
    for j in (0..n).filter(|&j| j != pivot) {
        t.push(j, col_of(j), 1.0);
    }
    Ok(NullBasis::new(SparseMatrix::from_triplets(&t)?, ratios, BasisKind::Fundamental))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflationStats {
    /// `nnz(z1ᵀ a z2)`.
    pub nnz_reduced: usize,
    /// `nnz_reduced / nnz_m`.
    pub infl: f64,
}

/// Size of the reduced matrix `z1ᵀ a z2` relative to the original system.
///
/// For two bidiagonal bases the reduced matrix can never exceed `4 |a|`
/// entries; that bound is checked here.
pub fn inflation_stats(a: &SparseMatrix, z1: &NullBasis, z2: &NullBasis, nnz_m: usize) -> Result<InflationStats> {
    let reduced = triple_product(&transpose(&z1.z), a, &z2.z)?;
    let nnz_reduced = reduced.nnz();
    if z1.kind == BasisKind::Bidiagonal && z2.kind == BasisKind::Bidiagonal {
        assert!(
            nnz_reduced <= 4 * a.nnz(),
            "bidiagonal bases produced {nnz_reduced} > 4 * {} entries",
            a.nnz()
        );
    }
    Ok(InflationStats {
        nnz_reduced,
        infl: nnz_reduced as f64 / nnz_m as f64,
    })
}

/// Upper bound `1 + max|ratio|` on the largest singular value of a bidiagonal basis.
pub fn sigma1_upper_bound(z: &NullBasis) -> Result<f64> {
    if z.kind != BasisKind::Bidiagonal {
        return Err(Error::UnsupportedBasisKind(z.kind));
    }
    Ok(1.0 + z.max_abs_ratio)
}

/// 1-norm condition estimate of `zᵀz`, factored with the sparse LU.
pub fn condest_ztz(z: &NullBasis) -> Result<f64> {
    let ztz = spgemm(&transpose(&z.z), &z.z)?;
    let lu = factorize(&ztz, &symbolic(&ztz)?, DEFAULT_PIVOT_TOL)?;
    condest(&ztz, &lu)
}
