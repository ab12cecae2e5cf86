//! Independent dense oracles. Nothing here calls into the library's numerics.
#![allow(dead_code)]

use densepre::sparse::{SparseMatrix, Triplets};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pattern(a: &SparseMatrix) -> Vec<Vec<bool>> {
    let mut p = vec![vec![false; a.ncols()]; a.nrows()];
    for (i, j, _) in a.iter() {
        p[i][j] = true;
    }
    p
}

pub fn dense(a: &SparseMatrix) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; a.ncols()]; a.nrows()];
    for (i, j, v) in a.iter() {
        d[i][j] = v;
    }
    d
}

/// Random matrix with each position present independently with probability `density`.
pub fn random_sparse(r: &mut ChaCha8Rng, m: usize, n: usize, density: f64) -> SparseMatrix {
    let mut t = Triplets::new(m, n);
    for i in 0..m {
        for j in 0..n {
            if r.gen_bool(density) {
                t.push(i, j, r.gen_range(-1.0..1.0));
            }
        }
    }
    SparseMatrix::from_triplets(&t).unwrap()
}

/// Random square matrix with a nonzero diagonal.
pub fn random_with_diagonal(r: &mut ChaCha8Rng, n: usize, density: f64) -> SparseMatrix {
    let mut t = Triplets::new(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                t.push(i, i, 1.0 + r.gen::<f64>());
            } else if r.gen_bool(density) {
                t.push(i, j, r.gen_range(-1.0..1.0));
            }
        }
    }
    SparseMatrix::from_triplets(&t).unwrap()
}

/// Number of `(i, j)` joined by at least one length-2 path `i -> k -> j` in the layered graph.
pub fn product_paths(a: &SparseMatrix, b: &SparseMatrix) -> (Vec<usize>, usize) {
    let (pa, pb) = (pattern(a), pattern(b));
    let rows: Vec<usize> = (0..a.nrows())
        .map(|i| {
            (0..b.ncols())
                .filter(|&j| (0..a.ncols()).any(|k| pa[i][k] && pb[k][j]))
                .count()
        })
        .collect();
    let total = rows.iter().sum();
    (rows, total)
}

pub fn bool_product(p: &[Vec<bool>], q: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let inner = q.len();
    let cols = q.first().map_or(0, |r| r.len());
    p.iter()
        .map(|row| (0..cols).map(|j| (0..inner).any(|k| row[k] && q[k][j])).collect())
        .collect()
}

/// nnz of the upper Cholesky factor of `aᵀa`, by elimination on the dense pattern.
pub fn cholesky_ata_nnz(a: &SparseMatrix) -> usize {
    let n = a.ncols();
    let p = pattern(a);
    let mut s = vec![vec![false; n]; n];
    for row in &p {
        let cols: Vec<usize> = (0..n).filter(|&j| row[j]).collect();
        for &i in &cols {
            for &j in &cols {
                s[i][j] = true;
            }
        }
    }
    for i in 0..n {
        s[i][i] = true;
    }
    for k in 0..n {
        let below: Vec<usize> = (k + 1..n).filter(|&i| s[i][k]).collect();
        for &i in &below {
            for &j in &below {
                s[i][j] = true;
            }
        }
    }
    (0..n).map(|k| (k..n).filter(|&j| s[k][j]).count()).sum()
}

/// Structural Householder QR by row merging on dense patterns. Returns `(|R|, |V|)`.
pub fn householder_counts(a: &SparseMatrix) -> (usize, usize) {
    let n = a.ncols();
    let mut active: Vec<Vec<bool>> = pattern(a).into_iter().filter(|r| r.iter().any(|&x| x)).collect();
    let (mut r_nnz, mut v_nnz) = (0, 0);
    for k in 0..n {
        let leading = |row: &Vec<bool>| row.iter().position(|&x| x) == Some(k);
        let (mut here, rest): (Vec<_>, Vec<_>) = active.into_iter().partition(|r| leading(r));
        active = rest;
        v_nnz += here.len().max(1);
        if here.is_empty() {
            r_nnz += 1;
            continue;
        }
        let mut union = vec![false; n];
        for row in &here {
            for j in 0..n {
                union[j] |= row[j];
            }
        }
        r_nnz += union.iter().filter(|&&x| x).count();
        here.pop();
        for _ in here {
            let mut row = union.clone();
            row[k] = false;
            if row.iter().any(|&x| x) {
                active.push(row);
            }
        }
    }
    (r_nnz, v_nnz)
}

/// Height of a parent forest: vertices on the longest root path.
pub fn forest_height(parent: &[Option<usize>]) -> usize {
    (0..parent.len())
        .map(|mut v| {
            let mut h = 1;
            while let Some(p) = parent[v] {
                v = p;
                h += 1;
            }
            h
        })
        .max()
        .unwrap_or(0)
}

/// Gaussian elimination with partial pivoting. `None` when a pivot is exactly zero.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| {
        let mut r = r.clone();
        r.push(bi);
        r
    }).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[p][k] == 0.0 {
            return None;
        }
        m.swap(k, p);
        for i in k + 1..n {
            let l = m[i][k] / m[k][k];
            if l != 0.0 {
                for j in k..=n {
                    m[i][j] -= l * m[k][j];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

pub fn inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(gauss_solve(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

pub fn norm1(a: &[Vec<f64>]) -> f64 {
    let n = a.first().map_or(0, |r| r.len());
    (0..n).map(|j| a.iter().map(|r| r[j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Exact 1-norm condition number through an explicit inverse.
pub fn cond1(a: &[Vec<f64>]) -> f64 {
    inverse(a).map_or(f64::INFINITY, |inv| norm1(a) * norm1(&inv))
}

pub fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(u, v)| u * v).sum()).collect()
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Largest singular value by power iteration on `zᵀz`, stopped at relative change `tol`.
pub fn sigma1(z: &SparseMatrix, tol: f64) -> f64 {
    let entries: Vec<(usize, usize, f64)> = z.iter().collect();
    let (m, n) = (z.nrows(), z.ncols());
    let mut v: Vec<f64> = (0..n).map(|j| 1.0 + (j % 7) as f64 * 0.1).collect();
    let mut lambda = 0.0f64;
    for _ in 0..50_000 {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let mut zv = vec![0.0; m];
        for &(i, j, a) in &entries {
            zv[i] += a * v[j];
        }
        let mut w = vec![0.0; n];
        for &(i, j, a) in &entries {
            w[j] += a * zv[i];
        }
        let next: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        v = w;
        if (next - lambda).abs() <= tol * next {
            return next.sqrt();
        }
        lambda = next;
    }
    lambda.sqrt()
}

/// Dense assembled saddle matrix and right-hand side.
pub fn assemble_dense(s: &densepre::SaddleSystem) -> (Vec<Vec<f64>>, Vec<f64>) {
    let (n, m) = (s.n(), s.m());
    let mut d = vec![vec![0.0; n + m]; n + m];
    for (i, j, v) in s.a.iter() {
        d[i][j] = v;
    }
    for (i, j, v) in s.b1.iter() {
        d[j][n + i] = v;
    }
    for (i, j, v) in s.b2.iter() {
        d[n + i][j] = v;
    }
    for (i, j, v) in s.c.iter() {
        d[n + i][n + j] = v;
    }
    let mut rhs = s.f.clone();
    rhs.extend_from_slice(&s.g);
    (d, rhs)
}
