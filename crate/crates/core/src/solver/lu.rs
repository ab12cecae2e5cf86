//! Left-looking sparse LU with threshold partial pivoting.
//!
//! Column `k` of the factors comes from one sparse triangular solve with the
//! columns of L computed so far. The nonzero pattern of that solve is found by
//! a depth-first search in the graph of L, so the work per column is
//! proportional to the arithmetic it performs.

use super::SymbolicPlan;
use crate::error::{Error, Result};
use crate::sparse::{transpose, SparseMatrix};

pub const DEFAULT_PIVOT_TOL: f64 = 0.1;
/// Largest tolerated `max|U| / max|A|`.
pub const MAX_GROWTH: f64 = 1e12;

/// `P A Q = L U` with unit lower-triangular `L` (diagonal not stored).
#[derive(Debug, Clone)]
pub struct LuFactors {
    /// Strictly lower part of L, in pivot order.
    pub l: SparseMatrix,
    /// Upper-triangular U, diagonal included.
    pub u: SparseMatrix,
    /// `row_perm[k]` is the original row chosen as pivot at step `k`.
    pub row_perm: Vec<usize>,
    /// `col_perm[k]` is the original column eliminated at step `k`.
    pub col_perm: Vec<usize>,
    /// `max|U| / max|A|`.
    pub growth: f64,
}

impl LuFactors {
    pub fn n(&self) -> usize {
        self.row_perm.len()
    }

    /// |L| + |U| counting the unit diagonal of L once (through U).
    pub fn nnz(&self) -> usize {
        self.l.nnz() + self.u.nnz()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::dims("lu solve", format!("expected length {n}, got {}", b.len())));
        }
        let mut z: Vec<f64> = self.row_perm.iter().map(|&i| b[i]).collect();
        // L z = P b
        for i in 0..n {
            let (cols, vals) = self.l.row(i);
            let mut s = z[i];
            for (&j, &v) in cols.iter().zip(vals) {
                s -= v * z[j];
            }
            z[i] = s;
        }
        // U w = z
        for i in (0..n).rev() {
            let (cols, vals) = self.u.row(i);
            // first stored entry of an upper-triangular row is its diagonal
            let mut s = z[i];
            for (&j, &v) in cols[1..].iter().zip(&vals[1..]) {
                s -= v * z[j];
            }
            z[i] = s / vals[0];
        }
        let mut x = vec![0.0; n];
        for (k, &j) in self.col_perm.iter().enumerate() {
            x[j] = z[k];
        }
        Ok(x)
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::dims(
                "lu solve_transpose",
                format!("expected length {n}, got {}", b.len()),
            ));
        }
        // Aᵀ = Q Uᵀ Lᵀ P
        let mut w: Vec<f64> = self.col_perm.iter().map(|&j| b[j]).collect();
        for i in 0..n {
            let (cols, vals) = self.u.row(i);
            let zi = w[i] / vals[0];
            w[i] = zi;
            for (&j, &v) in cols[1..].iter().zip(&vals[1..]) {
                w[j] -= v * zi;
            }
        }
        for i in (0..n).rev() {
            let (cols, vals) = self.l.row(i);
            let ti = w[i];
            for (&j, &v) in cols.iter().zip(vals) {
                w[j] -= v * ti;
            }
        }
        let mut x = vec![0.0; n];
        for (k, &i) in self.row_perm.iter().enumerate() {
            x[i] = w[k];
        }
        Ok(x)
    }

    /// `‖P A Q − L U‖∞ / ‖A‖∞`.
    pub fn relative_residual(&self, a: &SparseMatrix) -> Result<f64> {
        let n = self.n();
        let l_unit = crate::sparse::add(1.0, &self.l, 1.0, &SparseMatrix::identity(n))?;
        let lu = crate::sparse::spgemm(&l_unit, &self.u)?;
        let paq = a.permute(Some(&self.row_perm), Some(&self.col_perm));
        let diff = crate::sparse::add(1.0, &paq, -1.0, &lu)?;
        let norm = a.norm_inf();
        Ok(if norm == 0.0 { diff.norm_inf() } else { diff.norm_inf() / norm })
    }
}

/// Numeric factorization under a symbolic plan.
///
/// At each step the candidate on the diagonal of the permuted matrix is kept
/// when its magnitude is at least `pivot_tol` times the largest candidate;
/// otherwise the largest candidate is used.
pub fn factorize(a: &SparseMatrix, plan: &SymbolicPlan, pivot_tol: f64) -> Result<LuFactors> {
    let n = a.nrows();
    if a.ncols() != n || plan.col_perm.len() != n {
        return Err(Error::dims(
            "factorize",
            format!("matrix {:?}, plan of order {}", a.shape(), plan.col_perm.len()),
        ));
    }
    if !(0.0..=1.0).contains(&pivot_tol) {
        return Err(Error::InvalidParameter(format!(
            "pivot_tol must lie in [0, 1], got {pivot_tol}"
        )));
    }
    let cols = transpose(&a.permute(None, Some(&plan.col_perm)));
    let a_max = a.max_abs();

    const NONE: usize = usize::MAX;
    let mut pinv = vec![NONE; n];

    // L by columns, rows in original numbering until the end
    let mut l_ptr = Vec::with_capacity(n + 1);
    let mut l_idx: Vec<usize> = Vec::with_capacity(a.nnz());
    let mut l_val: Vec<f64> = Vec::with_capacity(a.nnz());
    l_ptr.push(0);
    // U by columns, rows in pivot-step numbering
    let mut u_ptr = Vec::with_capacity(n + 1);
    let mut u_idx: Vec<usize> = Vec::with_capacity(a.nnz());
    let mut u_val: Vec<f64> = Vec::with_capacity(a.nnz());
    u_ptr.push(0);

    let mut x = vec![0.0f64; n];
    let mut visited = vec![NONE; n];
    let mut topo: Vec<usize> = Vec::with_capacity(n);
    let mut stack: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut u_max = 0.0f64;

    for k in 0..n {
        let (b_rows, b_vals) = cols.row(k);

        // reach of the column pattern in the graph of L, reverse postorder
        topo.clear();
        for &start in b_rows {
            if visited[start] == k {
                continue;
            }
            visited[start] = k;
            stack.push((start, 0));
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                let j = pinv[node];
                let children: &[usize] = if j == NONE {
                    &[]
                } else {
                    &l_idx[l_ptr[j]..l_ptr[j + 1]]
                };
                let mut descended = false;
                while *next < children.len() {
                    let child = children[*next];
                    *next += 1;
                    if visited[child] != k {
                        visited[child] = k;
                        stack.push((child, 0));
                        descended = true;
                        break;
                    }
                }
                if !descended {
                    topo.push(node);
                    stack.pop();
                }
            }
        }

        for (&i, &v) in b_rows.iter().zip(b_vals) {
            x[i] = v;
        }
        for &i in topo.iter().rev() {
            let j = pinv[i];
            if j == NONE {
                continue;
            }
            let xi = x[i];
            if xi != 0.0 {
                for p in l_ptr[j]..l_ptr[j + 1] {
                    x[l_idx[p]] -= l_val[p] * xi;
                }
            }
        }

        // pivot choice among rows not yet pivotal
        let diag_row = plan.col_perm[k];
        let mut best = NONE;
        let mut best_abs = -1.0f64;
        for &i in topo.iter().rev() {
            if pinv[i] == NONE {
                let m = x[i].abs();
                if m > best_abs {
                    best_abs = m;
                    best = i;
                }
            }
        }
        if best == NONE || best_abs == 0.0 || !best_abs.is_finite() {
            return Err(Error::SingularMatrix { column: k });
        }
        let pivot_row = if visited[diag_row] == k
            && pinv[diag_row] == NONE
            && x[diag_row].abs() >= pivot_tol * best_abs
        {
            diag_row
        } else {
            best
        };
        let pivot = x[pivot_row];

        for &i in topo.iter().rev() {
            let j = pinv[i];
            if j != NONE {
                u_idx.push(j);
                u_val.push(x[i]);
                u_max = u_max.max(x[i].abs());
            } else if i != pivot_row {
                l_idx.push(i);
                l_val.push(x[i] / pivot);
            }
            x[i] = 0.0;
        }
        u_idx.push(k);
        u_val.push(pivot);
        u_max = u_max.max(pivot.abs());
        pinv[pivot_row] = k;
        l_ptr.push(l_idx.len());
        u_ptr.push(u_idx.len());
    }

    let growth = if a_max > 0.0 { u_max / a_max } else { 0.0 };
    if growth > MAX_GROWTH {
        return Err(Error::NumericalInstability { growth });
    }

    for i in l_idx.iter_mut() {
        *i = pinv[*i];
    }
    let l = csc_to_csr(n, &l_ptr, &mut l_idx, &mut l_val);
    let u = csc_to_csr(n, &u_ptr, &mut u_idx, &mut u_val);
    let mut row_perm = vec![0; n];
    for (i, &k) in pinv.iter().enumerate() {
        row_perm[k] = i;
    }
    Ok(LuFactors {
        l,
        u,
        row_perm,
        col_perm: plan.col_perm.clone(),
        growth,
    })
}

/// Converts square CSC arrays with unsorted columns into a CSR matrix.
fn csc_to_csr(n: usize, ptr: &[usize], idx: &mut [usize], val: &mut [f64]) -> SparseMatrix {
    let mut scratch: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let range = ptr[j]..ptr[j + 1];
        scratch.clear();
        scratch.extend(idx[range.clone()].iter().copied().zip(val[range.clone()].iter().copied()));
        scratch.sort_unstable_by_key(|&(i, _)| i);
        for (p, &(i, v)) in range.zip(scratch.iter()) {
            idx[p] = i;
            val[p] = v;
        }
    }
    // CSC of M is CSR of Mᵀ
    let csc = SparseMatrix::from_csr_unchecked(n, n, ptr.to_vec(), idx.to_vec(), val.to_vec());
    transpose(&csc)
}
