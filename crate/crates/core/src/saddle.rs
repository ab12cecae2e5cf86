//! Null-space solution of sparse saddle-point systems
//!
//! ```text
//! [ A   B1ᵀ ] [x]   [f]
//! [ B2  C   ] [y] = [g]
//! ```
//!
//! The two-sided method (C = 0) substitutes `x = Z2 v + x*` and projects the
//! first block row with `Z1ᵀ`, leaving the `(n-m) x (n-m)` system
//! `Z1ᵀ A Z2 v = Z1ᵀ (f - A x*)`. The one-sided method eliminates only the
//! block row `[B2 C]` (or the block column `[B1ᵀ; C]`) and leaves an `n x n`
//! system; it works for any `C`.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::nullbasis::{construct, particular_solution, BasisOptions, NullBasis};
use crate::solver::dense::{dense_rank, to_dmatrix};
use crate::solver::{factorize, symbolic};
use crate::sparse::{add, norm_inf, spgemm, spmv, spmv_transpose, transpose, triple_product, SparseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSystem {
    pub a: SparseMatrix,
    pub b1: SparseMatrix,
    pub b2: SparseMatrix,
    /// `m x m`, possibly with no stored entries.
    pub c: SparseMatrix,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl SaddleSystem {
    pub fn new(
        a: SparseMatrix,
        b1: SparseMatrix,
        b2: SparseMatrix,
        c: SparseMatrix,
        f: Vec<f64>,
        g: Vec<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        let m = b1.nrows();
        let ok = a.ncols() == n
            && b1.ncols() == n
            && b2.shape() == (m, n)
            && c.shape() == (m, m)
            && f.len() == n
            && g.len() == m;
        if !ok {
            return Err(Error::dims(
                "saddle system",
                format!(
                    "A {:?}, B1 {:?}, B2 {:?}, C {:?}, f {}, g {}",
                    a.shape(),
                    b1.shape(),
                    b2.shape(),
                    c.shape(),
                    f.len(),
                    g.len()
                ),
            ));
        }
        if m == 0 || m > n {
            return Err(Error::dims("saddle system", format!("need 1 <= m <= n, got m = {m}, n = {n}")));
        }
        Ok(SaddleSystem { a, b1, b2, c, f, g })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b1.nrows()
    }

    /// True when every stored entry of C is exactly zero.
    pub fn c_is_zero(&self) -> bool {
        self.c.is_numerically_zero()
    }

    /// The full `(n+m) x (n+m)` matrix.
    pub fn assemble(&self) -> Result<SparseMatrix> {
        let b1t = transpose(&self.b1);
        SparseMatrix::block(&[
            vec![Some(&self.a), Some(&b1t)],
            vec![Some(&self.b2), Some(&self.c)],
        ])
    }

    /// `(f; g)`.
    pub fn rhs(&self) -> Vec<f64> {
        let mut r = self.f.clone();
        r.extend_from_slice(&self.g);
        r
    }

    /// `‖M (x; y) - (f; g)‖∞ / ‖(f; g)‖∞`, or the absolute residual for a zero rhs.
    pub fn residual_inf(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let mut top = spmv(&self.a, x)?;
        for (t, v) in top.iter_mut().zip(spmv_transpose(&self.b1, y)?) {
            *t += v;
        }
        let mut bot = spmv(&self.b2, x)?;
        for (t, v) in bot.iter_mut().zip(spmv(&self.c, y)?) {
            *t += v;
        }
        let r = top
            .iter()
            .zip(&self.f)
            .chain(bot.iter().zip(&self.g))
            .fold(0.0f64, |acc, (p, q)| acc.max((p - q).abs()));
        let scale = norm_inf(&self.f).max(norm_inf(&self.g));
        Ok(if scale > 0.0 { r / scale } else { r })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    TwoSided,
    /// Eliminates the block row `[B2 C]`.
    OneSidedRow,
    /// Eliminates the block column `[B1ᵀ; C]`.
    OneSidedCol,
}

/// Reduced system plus what is needed to recover `(x, y)`.
#[derive(Debug, Clone)]
pub struct PrestructureResult {
    pub mode: Mode,
    pub reduced: SparseMatrix,
    pub rhs: Vec<f64>,
    /// Left basis: of B1 (two-sided) or of `[B1 Cᵀ]` (column mode).
    pub z1: Option<NullBasis>,
    /// Right basis: of B2 (two-sided) or of `[B2 C]` (row mode).
    pub z2: Option<NullBasis>,
    /// `x = z_x v + x_star`.
    pub z_x: SparseMatrix,
    /// `y = z_c v + y_star` in row mode.
    pub z_c: Option<SparseMatrix>,
    pub x_star: Vec<f64>,
    pub y_star: Option<Vec<f64>>,
    /// Time spent building the null bases.
    pub basis_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Relative residual on the original system.
    pub residual_inf: f64,
    pub diff_vs_oracle: Option<f64>,
}

/// `(x*, y*)` with `b x* + c y* = g` for a single constraint row.
///
/// The first numerical nonzero of `[b c]` takes the whole right-hand side.
pub fn particular_solution_row(
    b: &SparseMatrix,
    c_entry: Option<f64>,
    g: f64,
    eps: f64,
) -> Result<(Vec<f64>, Option<f64>)> {
    let n = b.ncols();
    let mut x = vec![0.0; n];
    let mut y = c_entry.map(|_| 0.0);
    if g == 0.0 {
        return Ok((x, y));
    }
    let (cols, vals) = b.row(0);
    if let Some((&j, &v)) = cols.iter().zip(vals).find(|(_, v)| v.abs() > eps) {
        x[j] = g / v;
    } else {
        match c_entry {
            Some(c) if c.abs() > eps => y = Some(g / c),
            _ => return Err(Error::InconsistentConstraint { row: 0 }),
        }
    }
    Ok((x, y))
}

pub fn prestructure_two_sided(s: &SaddleSystem, opts: &BasisOptions) -> Result<PrestructureResult> {
    if !s.c_is_zero() {
        return Err(Error::RequiresOneSided);
    }
    let start = Instant::now();
    let z1 = construct(&s.b1, opts)?;
    let z2 = construct(&s.b2, opts)?;
    let basis_time = start.elapsed();
    let x_star = particular_solution(&s.b2, &s.g, opts.eps)?;

    let reduced = triple_product(&transpose(&z1.z), &s.a, &z2.z)?;
    let ax = spmv(&s.a, &x_star)?;
    let r: Vec<f64> = s.f.iter().zip(&ax).map(|(f, a)| f - a).collect();
    let rhs = spmv_transpose(&z1.z, &r)?;
    let z_x = z2.z.clone();
    Ok(PrestructureResult {
        mode: Mode::TwoSided,
        reduced,
        rhs,
        z1: Some(z1),
        z2: Some(z2),
        z_x,
        z_c: None,
        x_star,
        y_star: None,
        basis_time,
    })
}

pub fn solve_two_sided(p: &PrestructureResult, s: &SaddleSystem, pivot_tol: f64) -> Result<SaddleSolution> {
    if p.mode != Mode::TwoSided {
        return Err(Error::InvalidParameter(format!("expected a two-sided prestructure, got {:?}", p.mode)));
    }
    let v = solve_reduced(&p.reduced, &p.rhs, pivot_tol)?;
    let x = recover(&p.z_x, &v, &p.x_star)?;

    // B1 B1ᵀ y = B1 (f - A x)
    let ax = spmv(&s.a, &x)?;
    let r: Vec<f64> = s.f.iter().zip(&ax).map(|(f, a)| f - a).collect();
    let rhs_y = spmv(&s.b1, &r)?;
    let gram = spgemm(&s.b1, &transpose(&s.b1))?;
    let y = small_solve(&gram, &rhs_y)?;

    let residual_inf = s.residual_inf(&x, &y)?;
    Ok(SaddleSolution {
        x,
        y,
        residual_inf,
        diff_vs_oracle: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Row,
    Column,
}

pub fn prestructure_one_sided(s: &SaddleSystem, target: Target, opts: &BasisOptions) -> Result<PrestructureResult> {
    let (n, m) = (s.n(), s.m());
    match target {
        Target::Row => {
            let k = SparseMatrix::block(&[vec![Some(&s.b2), Some(&s.c)]])?;
            check_rows(&k, opts.eps)?;
            let start = Instant::now();
            let zh = construct(&k, opts)?;
            let basis_time = start.elapsed();
            let u = particular_solution(&k, &s.g, opts.eps)?;
            let (x_star, y_star) = (u[..n].to_vec(), u[n..].to_vec());

            let z_top = zh.z.row_slice(0, n);
            let z_c = zh.z.row_slice(n, n + m);
            let reduced = add(1.0, &spgemm(&s.a, &z_top)?, 1.0, &spgemm(&transpose(&s.b1), &z_c)?)?;
            let ax = spmv(&s.a, &x_star)?;
            let by = spmv_transpose(&s.b1, &y_star)?;
            let rhs = (0..n).map(|i| s.f[i] - ax[i] - by[i]).collect();
            Ok(PrestructureResult {
                mode: Mode::OneSidedRow,
                reduced,
                rhs,
                z1: None,
                z2: Some(zh),
                z_x: z_top,
                z_c: Some(z_c),
                x_star,
                y_star: Some(y_star),
                basis_time,
            })
        }
        Target::Column => {
            let ct = transpose(&s.c);
            let k = SparseMatrix::block(&[vec![Some(&s.b1), Some(&ct)]])?;
            check_rows(&k, opts.eps)?;
            let start = Instant::now();
            let zh = construct(&k, opts)?;
            let basis_time = start.elapsed();

            // columns 0..n of Ẑᵀ act on the first block row, n..n+m on the second
            let (top_t, bot_t) = split_columns(&transpose(&zh.z), n);
            let reduced = add(1.0, &spgemm(&top_t, &s.a)?, 1.0, &spgemm(&bot_t, &s.b2)?)?;
            let mut rhs = spmv(&top_t, &s.f)?;
            for (r, v) in rhs.iter_mut().zip(spmv(&bot_t, &s.g)?) {
                *r += v;
            }
            Ok(PrestructureResult {
                mode: Mode::OneSidedCol,
                reduced,
                rhs,
                z1: Some(zh),
                z2: None,
                z_x: SparseMatrix::identity(n),
                z_c: None,
                x_star: vec![0.0; n],
                y_star: None,
                basis_time,
            })
        }
    }
}

pub fn solve_one_sided(p: &PrestructureResult, s: &SaddleSystem, pivot_tol: f64) -> Result<SaddleSolution> {
    let v = solve_reduced(&p.reduced, &p.rhs, pivot_tol)?;
    let x = recover(&p.z_x, &v, &p.x_star)?;
    let y = match p.mode {
        Mode::OneSidedRow => {
            let z_c = p.z_c.as_ref().expect("row mode stores z_c");
            let y_star = p.y_star.as_ref().expect("row mode stores y_star");
            recover(z_c, &v, y_star)?
        }
        Mode::OneSidedCol => {
            // least squares on [B1ᵀ; C] y = [f - A x; g - B2 x], exact for a consistent system
            let ax = spmv(&s.a, &x)?;
            let bx = spmv(&s.b2, &x)?;
            let r1: Vec<f64> = s.f.iter().zip(&ax).map(|(f, a)| f - a).collect();
            let r2: Vec<f64> = s.g.iter().zip(&bx).map(|(g, b)| g - b).collect();
            let mut rhs_y = spmv(&s.b1, &r1)?;
            for (t, v) in rhs_y.iter_mut().zip(spmv_transpose(&s.c, &r2)?) {
                *t += v;
            }
            let gram = add(
                1.0,
                &spgemm(&s.b1, &transpose(&s.b1))?,
                1.0,
                &spgemm(&transpose(&s.c), &s.c)?,
            )?;
            small_solve(&gram, &rhs_y)?
        }
        Mode::TwoSided => {
            return Err(Error::InvalidParameter("expected a one-sided prestructure".into()));
        }
    };
    let residual_inf = s.residual_inf(&x, &y)?;
    Ok(SaddleSolution {
        x,
        y,
        residual_inf,
        diff_vs_oracle: None,
    })
}

/// Prestructures and solves in one call.
pub fn solve_prestructured(s: &SaddleSystem, mode: Mode, opts: &BasisOptions, pivot_tol: f64) -> Result<SaddleSolution> {
    match mode {
        Mode::TwoSided => solve_two_sided(&prestructure_two_sided(s, opts)?, s, pivot_tol),
        Mode::OneSidedRow => solve_one_sided(&prestructure_one_sided(s, Target::Row, opts)?, s, pivot_tol),
        Mode::OneSidedCol => solve_one_sided(&prestructure_one_sided(s, Target::Column, opts)?, s, pivot_tol),
    }
}

/// Sparse LU on the assembled system, without prestructuring.
pub fn solve_standard(s: &SaddleSystem, pivot_tol: f64) -> Result<SaddleSolution> {
    let m_full = s.assemble()?;
    let plan = symbolic(&m_full)?;
    let u = factorize(&m_full, &plan, pivot_tol)?.solve(&s.rhs())?;
    let n = s.n();
    let (x, y) = (u[..n].to_vec(), u[n..].to_vec());
    let residual_inf = s.residual_inf(&x, &y)?;
    Ok(SaddleSolution {
        x,
        y,
        residual_inf,
        diff_vs_oracle: None,
    })
}

/// `‖x - reference‖∞ / ‖reference‖∞`.
pub fn relative_diff(x: &[f64], reference: &[f64]) -> f64 {
    let d = x.iter().zip(reference).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let s = norm_inf(reference);
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

fn check_rows(k: &SparseMatrix, eps: f64) -> Result<()> {
    for i in 0..k.nrows() {
        if k.row(i).1.iter().all(|v| v.abs() <= eps) {
            return Err(Error::ZeroRow);
        }
    }
    Ok(())
}

fn split_columns(a: &SparseMatrix, at: usize) -> (SparseMatrix, SparseMatrix) {
    let t = transpose(a);
    (transpose(&t.row_slice(0, at)), transpose(&t.row_slice(at, a.ncols())))
}

fn solve_reduced(reduced: &SparseMatrix, rhs: &[f64], pivot_tol: f64) -> Result<Vec<f64>> {
    let plan = symbolic(reduced)?;
    let lu = factorize(reduced, &plan, pivot_tol).map_err(|e| match e {
        Error::SingularMatrix { column } => Error::SingularReducedSystem { column },
        other => other,
    })?;
    lu.solve(rhs)
}

fn recover(z: &SparseMatrix, v: &[f64], star: &[f64]) -> Result<Vec<f64>> {
    let mut out = spmv(z, v)?;
    for (o, s) in out.iter_mut().zip(star) {
        *o += s;
    }
    Ok(out)
}

/// Dense solve of a small symmetric positive definite `m x m` system.
fn small_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.nrows() == 1 {
        let d = a.get(0, 0).unwrap_or(0.0);
        if d == 0.0 {
            return Err(Error::SingularMatrix { column: 0 });
        }
        return Ok(vec![b[0] / d]);
    }
    to_dmatrix(a)
        .lu()
        .solve(&DVector::from_column_slice(b))
        .map(|y| y.as_slice().to_vec())
        .ok_or(Error::SingularMatrix { column: 0 })
}

/// Largest `n + m` accepted by [`verify_invertibility_conditions`].
pub const VERIFY_LIMIT: usize = 300;

/// Dense rank checks behind invertibility of the saddle matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvertibilityReport {
    pub b1_full_row_rank: bool,
    pub b2_full_row_rank: bool,
    /// `N(A) ∩ N(B2) = {0}`.
    pub kernels_intersect_trivially: bool,
    /// `R(A Z2) ∩ R(B1ᵀ) = {0}`, Z2 a basis of `N(B2)`.
    pub ranges_intersect_trivially: bool,
    pub m_invertible: bool,
}

impl InvertibilityReport {
    pub fn all_hold(&self) -> bool {
        self.b1_full_row_rank
            && self.b2_full_row_rank
            && self.kernels_intersect_trivially
            && self.ranges_intersect_trivially
            && self.m_invertible
    }
}

pub fn verify_invertibility_conditions(s: &SaddleSystem) -> Result<InvertibilityReport> {
    let (n, m) = (s.n(), s.m());
    if n + m > VERIFY_LIMIT {
        return Err(Error::DeskScaleOnly {
            size: n + m,
            limit: VERIFY_LIMIT,
        });
    }
    let a = to_dmatrix(&s.a);
    let b1 = to_dmatrix(&s.b1);
    let b2 = to_dmatrix(&s.b2);

    let mut a_b2 = DMatrix::zeros(n + m, n);
    a_b2.view_mut((0, 0), (n, n)).copy_from(&a);
    a_b2.view_mut((n, 0), (m, n)).copy_from(&b2);

    let z2 = dense_null_space(&b2);
    let az2 = &a * &z2;
    let b1t = b1.transpose();
    let mut joined = DMatrix::zeros(n, az2.ncols() + m);
    joined.view_mut((0, 0), (n, az2.ncols())).copy_from(&az2);
    joined.view_mut((0, az2.ncols()), (n, m)).copy_from(&b1t);

    Ok(InvertibilityReport {
        b1_full_row_rank: dense_rank(&b1) == m,
        b2_full_row_rank: dense_rank(&b2) == m,
        kernels_intersect_trivially: dense_rank(&a_b2) == n,
        ranges_intersect_trivially: dense_rank(&joined) == dense_rank(&az2) + dense_rank(&b1t),
        m_invertible: dense_rank(&to_dmatrix(&s.assemble()?)) == n + m,
    })
}

/// Orthonormal basis of the null space of a wide matrix, from a square SVD.
fn dense_null_space(b: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, n) = b.shape();
    let mut sq = DMatrix::zeros(n, n);
    sq.view_mut((0, 0), (m, n)).copy_from(b);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max();
    let tol = n as f64 * f64::EPSILON * smax.max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..n).filter(|&k| svd.singular_values[k] <= tol).collect();
    let mut z = DMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        for i in 0..n {
            z[(i, c)] = vt[(k, i)];
        }
    }
    z
}
