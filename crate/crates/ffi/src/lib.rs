//! C interface to densepre.
//!
//! Matrices, systems and solutions are opaque handles created by `dp_*`
//! constructors and released with the matching `dp_*_free`. Every fallible
//! call returns a [`DpStatus`]; on failure a description is available from
//! [`dp_last_error_message`] on the same thread. Panics never cross the
//! boundary and are reported as `DP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use densepre::generators::{arrowhead, poisson_neumann, read_system, ArrowheadSpec, MeshSpec, RowPattern};
use densepre::saddle::{solve_prestructured, solve_standard};
use densepre::sparse::{read_matrix_market, spgemm, write_matrix_market};
use densepre::{BasisOptions, Error, Mode, SaddleSolution, SaddleSystem, SparseMatrix, Triplets};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Parse = 4,
    Io = 5,
    Singular = 6,
    RankDeficient = 7,
    NumericalInstability = 8,
    RequiresOneSided = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpMode {
    TwoSided = 0,
    OneSidedRow = 1,
    OneSidedCol = 2,
    Standard = 3,
}

/// Sparse matrix in compressed row storage.
pub struct DpMatrix(SparseMatrix);

/// Saddle-point system with blocks A, B1, B2, C and right-hand sides f, g.
pub struct DpSystem(SaddleSystem);

/// Solution vectors and the relative residual on the original system.
pub struct DpSolution(SaddleSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DpStatus {
    match e {
        Error::IndexOutOfRange { .. } | Error::InvalidStructure(_) | Error::InvalidParameter(_) => {
            DpStatus::InvalidArgument
        }
        Error::DimensionMismatch { .. } => DpStatus::DimensionMismatch,
        Error::Parse { .. } | Error::UnsupportedFormat { .. } => DpStatus::Parse,
        Error::Io(_) => DpStatus::Io,
        Error::SingularMatrix { .. } | Error::SingularReducedSystem { .. } | Error::ZeroPivot { .. } => {
            DpStatus::Singular
        }
        Error::ZeroRow | Error::RankDeficiency { .. } | Error::InconsistentConstraint { .. } => {
            DpStatus::RankDeficient
        }
        Error::NumericalInstability { .. } => DpStatus::NumericalInstability,
        Error::RequiresOneSided => DpStatus::RequiresOneSided,
        Error::UnsupportedBasisKind(_) | Error::DeskScaleOnly { .. } => DpStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (DpStatus, String)>) -> DpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DpStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DpStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (DpStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DpStatus, String) {
    (DpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a str, (DpStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (DpStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (DpStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), (DpStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn dp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn dp_status_string(status: DpStatus) -> *const c_char {
    let s: &'static CStr = match status {
        DpStatus::Ok => c"ok",
        DpStatus::NullPointer => c"null pointer argument",
        DpStatus::InvalidArgument => c"invalid argument",
        DpStatus::DimensionMismatch => c"dimension mismatch",
        DpStatus::Parse => c"parse error",
        DpStatus::Io => c"I/O error",
        DpStatus::Singular => c"singular matrix",
        DpStatus::RankDeficient => c"rank-deficient constraint block",
        DpStatus::NumericalInstability => c"numerical instability",
        DpStatus::RequiresOneSided => c"nonzero C block requires a one-sided method",
        DpStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn dp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a matrix from 0-based triplets; duplicates are summed.
///
/// # Safety
/// `rows`, `cols` and `vals` must each point to `nnz` readable elements.
#[no_mangle]
pub unsafe extern "C" fn dp_matrix_from_triplets(
    nrows: usize,
    ncols: usize,
    nnz: usize,
    rows: *const usize,
    cols: *const usize,
    vals: *const f64,
    out: *mut *mut DpMatrix,
) -> DpStatus {
    guard(|| {
        let r = slice_arg(rows, nnz, "rows")?;
        let c = slice_arg(cols, nnz, "cols")?;
        let v = slice_arg(vals, nnz, "vals")?;
        let mut t = Triplets::with_capacity(nrows, ncols, nnz);
        for k in 0..nnz {
            t.push(r[k], c[k], v[k]);
        }
        let m = SparseMatrix::from_triplets(&t).map_err(lib_err)?;
        write_out(out, DpMatrix(m))
    })
}

/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dp_matrix_read_mtx(path: *const c_char, out: *mut *mut DpMatrix) -> DpStatus {
    guard(|| {
        let m = read_matrix_market(path_arg(path)?).map_err(lib_err)?;
        write_out(out, DpMatrix(m))
    })
}

/// # Safety
/// `m` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dp_matrix_write_mtx(m: *const DpMatrix, path: *const c_char) -> DpStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        write_matrix_market(&m.0, path_arg(path)?).map_err(lib_err)
    })
}

/// `out = a * b`.
///
/// # Safety
/// `a` and `b` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn dp_matrix_spgemm(a: *const DpMatrix, b: *const DpMatrix, out: *mut *mut DpMatrix) -> DpStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        let c = spgemm(&a.0, &b.0).map_err(lib_err)?;
        write_out(out, DpMatrix(c))
    })
}

/// # Safety
/// `m` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dp_matrix_nrows(m: *const DpMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.nrows())
}

/// # Safety
/// `m` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dp_matrix_ncols(m: *const DpMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.ncols())
}

/// # Safety
/// `m` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dp_matrix_nnz(m: *const DpMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.nnz())
}

/// Borrowed views of the CSR arrays, valid while the handle lives.
/// `row_ptr` has `nrows + 1` entries, the other two `nnz`.
///
/// # Safety
/// `m` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn dp_matrix_csr(
    m: *const DpMatrix,
    row_ptr: *mut *const usize,
    col_idx: *mut *const usize,
    values: *mut *const f64,
) -> DpStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        if row_ptr.is_null() || col_idx.is_null() || values.is_null() {
            return Err(null("output pointer"));
        }
        *row_ptr = m.0.row_ptr().as_ptr();
        *col_idx = m.0.col_idx().as_ptr();
        *values = m.0.values().as_ptr();
        Ok(())
    })
}

/// # Safety
/// `m` must be a handle from this library or NULL; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn dp_matrix_free(m: *mut DpMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Copies the blocks into a new system. `c` may be NULL for an empty `m x m` block.
///
/// # Safety
/// Matrix arguments must be live handles (or NULL where allowed);
/// `f` must hold `n` values and `g` `m` values.
#[no_mangle]
pub unsafe extern "C" fn dp_system_new(
    a: *const DpMatrix,
    b1: *const DpMatrix,
    b2: *const DpMatrix,
    c: *const DpMatrix,
    f: *const f64,
    n: usize,
    g: *const f64,
    m: usize,
    out: *mut *mut DpSystem,
) -> DpStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b1 = b1.as_ref().ok_or_else(|| null("b1"))?;
        let b2 = b2.as_ref().ok_or_else(|| null("b2"))?;
        let c = c.as_ref().map_or_else(|| SparseMatrix::zeros(m, m), |c| c.0.clone());
        let f = slice_arg(f, n, "f")?.to_vec();
        let g = slice_arg(g, m, "g")?.to_vec();
        let s = SaddleSystem::new(a.0.clone(), b1.0.clone(), b2.0.clone(), c, f, g).map_err(lib_err)?;
        write_out(out, DpSystem(s))
    })
}

/// Bordered identity of order `n` with `b2_nnz` random entries in B2
/// (`b2_nnz = n` for a full row), a full B1 and `C = [c]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dp_system_arrowhead(
    n: usize,
    b2_nnz: usize,
    c: f64,
    seed: u64,
    out: *mut *mut DpSystem,
) -> DpStatus {
    guard(|| {
        let spec = ArrowheadSpec {
            b2: RowPattern::Count(b2_nnz),
            c_value: c,
            ..ArrowheadSpec::full(n, seed)
        };
        write_out(out, DpSystem(arrowhead(&spec).map_err(lib_err)?))
    })
}

/// P1 Poisson problem with Neumann boundary on a `k x k` vertex grid.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dp_system_poisson(k: usize, out: *mut *mut DpSystem) -> DpStatus {
    guard(|| write_out(out, DpSystem(poisson_neumann(&MeshSpec { k }).map_err(lib_err)?)))
}

/// Reads a directory written by `densepre generate`.
///
/// # Safety
/// `dir` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dp_system_read_dir(dir: *const c_char, out: *mut *mut DpSystem) -> DpStatus {
    guard(|| {
        let s = read_system(path_arg(dir)?).map_err(lib_err)?;
        write_out(out, DpSystem(s))
    })
}

/// # Safety
/// `s` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dp_system_n(s: *const DpSystem) -> usize {
    s.as_ref().map_or(0, |s| s.0.n())
}

/// # Safety
/// `s` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dp_system_m(s: *const DpSystem) -> usize {
    s.as_ref().map_or(0, |s| s.0.m())
}

/// The full `(n+m) x (n+m)` matrix as a new handle.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dp_system_assemble(s: *const DpSystem, out: *mut *mut DpMatrix) -> DpStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("system"))?;
        write_out(out, DpMatrix(s.0.assemble().map_err(lib_err)?))
    })
}

/// # Safety
/// `s` must be a handle from this library or NULL; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn dp_system_free(s: *mut DpSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Solves the system. `eps` is the drop tolerance used when building null
/// bases; `pivot_tol` in `[0, 1]` controls threshold pivoting.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dp_solve(
    s: *const DpSystem,
    mode: DpMode,
    eps: f64,
    pivot_tol: f64,
    out: *mut *mut DpSolution,
) -> DpStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("system"))?;
        let opts = BasisOptions {
            eps,
            normalize_columns: false,
        };
        let sol = match mode {
            DpMode::TwoSided => solve_prestructured(&s.0, Mode::TwoSided, &opts, pivot_tol),
            DpMode::OneSidedRow => solve_prestructured(&s.0, Mode::OneSidedRow, &opts, pivot_tol),
            DpMode::OneSidedCol => solve_prestructured(&s.0, Mode::OneSidedCol, &opts, pivot_tol),
            DpMode::Standard => solve_standard(&s.0, pivot_tol),
        }
        .map_err(lib_err)?;
        write_out(out, DpSolution(sol))
    })
}

/// # Safety
/// `sol` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dp_solution_n(sol: *const DpSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.0.x.len())
}

/// # Safety
/// `sol` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dp_solution_m(sol: *const DpSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.0.y.len())
}

/// Borrowed pointer to `x`, valid while the handle lives.
///
/// # Safety
/// `sol` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dp_solution_x(sol: *const DpSolution) -> *const f64 {
    sol.as_ref().map_or(ptr::null(), |s| s.0.x.as_ptr())
}

/// Borrowed pointer to `y`, valid while the handle lives.
///
/// # Safety
/// `sol` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dp_solution_y(sol: *const DpSolution) -> *const f64 {
    sol.as_ref().map_or(ptr::null(), |s| s.0.y.as_ptr())
}

/// Relative infinity-norm residual on the original system, NaN for NULL.
///
/// # Safety
/// `sol` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dp_solution_residual(sol: *const DpSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.0.residual_inf)
}

/// # Safety
/// `sol` must be a handle from this library or NULL; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn dp_solution_free(sol: *mut DpSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}
