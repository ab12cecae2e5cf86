//! Timing harness comparing the prestructured solve with a direct solve of
//! the assembled system, and the table schedules reproduced by the CLI.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::generators::{arrowhead, poisson_neumann, ArrowheadSpec, FirstRow, MeshSpec, RowPattern};
use crate::nullbasis::BasisOptions;
use crate::saddle::{
    prestructure_one_sided, prestructure_two_sided, relative_diff, solve_one_sided, solve_standard,
    solve_two_sided, Mode, SaddleSolution, SaddleSystem, Target,
};

pub const CSV_HEADER: &str = "n_plus_m,nnz_m,nnz_b,nnz_reduced,infl,diff,z_time_s,ns_time_s,s_time_s,speedup,error";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMode {
    TwoSided,
    OneSidedRow,
    OneSidedCol,
    Standard,
    /// Prestructured (two-sided when C is zero, row one-sided otherwise) and standard.
    Both,
}

impl FromStr for BenchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "two-sided" => BenchMode::TwoSided,
            "one-sided-row" => BenchMode::OneSidedRow,
            "one-sided-col" => BenchMode::OneSidedCol,
            "standard" => BenchMode::Standard,
            "both" => BenchMode::Both,
            other => return Err(Error::InvalidParameter(format!("unknown mode `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub mode: BenchMode,
    pub basis: BasisOptions,
    pub pivot_tol: f64,
    pub seed: u64,
    pub repeats: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: BenchMode::Both,
            basis: BasisOptions::default(),
            pivot_tol: crate::solver::DEFAULT_PIVOT_TOL,
            seed: 0,
            repeats: 3,
        }
    }
}

/// One row of a statistics table. Absent values are written as empty fields.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchRecord {
    pub n_plus_m: usize,
    pub nnz_m: usize,
    /// Entries of the eliminated constraint block, B2 together with C.
    pub nnz_b: usize,
    pub nnz_reduced: Option<usize>,
    pub infl: Option<f64>,
    pub diff: Option<f64>,
    pub z_time_s: Option<f64>,
    /// Whole prestructured solve, basis construction included.
    pub ns_time_s: Option<f64>,
    pub s_time_s: Option<f64>,
    pub speedup: Option<f64>,
    pub error: Option<String>,
}

impl BenchRecord {
    pub fn to_csv(&self) -> String {
        fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map_or(String::new(), |v| v.to_string())
        }
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.n_plus_m,
            self.nnz_m,
            self.nnz_b,
            opt(&self.nnz_reduced),
            opt(&self.infl),
            self.diff.map_or(String::new(), |d| format!("{d:e}")),
            opt(&self.z_time_s),
            opt(&self.ns_time_s),
            opt(&self.s_time_s),
            opt(&self.speedup),
            self.error.as_deref().map_or(String::new(), |e| e.replace([',', '\n'], ";")),
        );
        s
    }
}

pub fn write_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

struct Prestructured {
    nnz_reduced: usize,
    z_time: f64,
    total: f64,
    solution: SaddleSolution,
}

fn run_prestructured(s: &SaddleSystem, mode: Mode, cfg: &RunConfig) -> Result<Prestructured> {
    let start = Instant::now();
    let (p, solution) = match mode {
        Mode::TwoSided => {
            let p = prestructure_two_sided(s, &cfg.basis)?;
            let sol = solve_two_sided(&p, s, cfg.pivot_tol)?;
            (p, sol)
        }
        Mode::OneSidedRow | Mode::OneSidedCol => {
            let target = if mode == Mode::OneSidedRow { Target::Row } else { Target::Column };
            let p = prestructure_one_sided(s, target, &cfg.basis)?;
            let sol = solve_one_sided(&p, s, cfg.pivot_tol)?;
            (p, sol)
        }
    };
    let total = start.elapsed().as_secs_f64();
    Ok(Prestructured {
        nnz_reduced: p.reduced.nnz(),
        z_time: p.basis_time.as_secs_f64(),
        total,
        solution,
    })
}

fn min_opt(slot: &mut Option<f64>, v: f64) {
    *slot = Some(slot.map_or(v, |s| s.min(v)));
}

/// Runs the configured solves `repeats` times and keeps the fastest time of each phase.
///
/// A failing solve is reported in the record's `error` field; the call itself
/// fails only on invalid configuration.
pub fn run_bench(s: &SaddleSystem, cfg: &RunConfig) -> Result<BenchRecord> {
    if cfg.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    let m_full = s.assemble()?;
    let mut rec = BenchRecord {
        n_plus_m: s.n() + s.m(),
        nnz_m: m_full.nnz(),
        nnz_b: s.b2.nnz() + s.c.nnz(),
        ..Default::default()
    };
    let ns_mode = match cfg.mode {
        BenchMode::TwoSided => Some(Mode::TwoSided),
        BenchMode::OneSidedRow => Some(Mode::OneSidedRow),
        BenchMode::OneSidedCol => Some(Mode::OneSidedCol),
        BenchMode::Standard => None,
        BenchMode::Both if s.c_is_zero() => Some(Mode::TwoSided),
        BenchMode::Both => Some(Mode::OneSidedRow),
    };
    let run_standard = matches!(cfg.mode, BenchMode::Standard | BenchMode::Both);

    let mut ns_x = None;
    let mut s_x = None;
    for _ in 0..cfg.repeats {
        if let Some(mode) = ns_mode {
            match run_prestructured(s, mode, cfg) {
                Ok(r) => {
                    rec.nnz_reduced = Some(r.nnz_reduced);
                    min_opt(&mut rec.z_time_s, r.z_time);
                    min_opt(&mut rec.ns_time_s, r.total);
                    ns_x = Some(r.solution.x);
                }
                Err(e) => {
                    rec.error = Some(format!("prestructured: {e}"));
                    break;
                }
            }
        }
        if run_standard {
            let start = Instant::now();
            match solve_standard(s, cfg.pivot_tol) {
                Ok(sol) => {
                    min_opt(&mut rec.s_time_s, start.elapsed().as_secs_f64());
                    s_x = Some(sol.x);
                }
                Err(e) => {
                    rec.error = Some(format!("standard: {e}"));
                    break;
                }
            }
        }
    }
    if rec.error.is_some() {
        rec.z_time_s = None;
        rec.ns_time_s = None;
        rec.s_time_s = None;
    }
    rec.infl = rec.nnz_reduced.map(|r| r as f64 / rec.nnz_m as f64);
    if cfg.mode == BenchMode::Both {
        if let (Some(x), Some(xs)) = (&ns_x, &s_x) {
            rec.diff = Some(relative_diff(x, xs));
        }
    }
    if let (Some(st), Some(nt)) = (rec.s_time_s, rec.ns_time_s) {
        rec.speedup = Some(st / nt);
    }
    Ok(rec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    /// Full rows, `n = 25000 r` for `r = 1..=20`.
    ArrowheadGrowth,
    /// `n = 250000`, B1 = B2 with growing support.
    ArrowheadDensity,
    /// `k = 201 + 25 r` vertices per side for `r = 0..15`.
    PoissonSquare,
}

impl FromStr for Table {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "arrowhead_growth" => Table::ArrowheadGrowth,
            "arrowhead_density" => Table::ArrowheadDensity,
            "poisson_square" => Table::PoissonSquare,
            other => return Err(Error::InvalidParameter(format!("unknown table `{other}`"))),
        })
    }
}

/// Sizes of the density sweep, counting the corner entry with the row.
pub const DENSITY_SWEEP: [usize; 15] = [
    4, 26, 251, 2490, 6175, 12219, 23791, 45314, 82359, 98327, 112684, 125802, 137536, 158022, 250001,
];
const DENSITY_N: usize = 250_000;

/// A problem in one of the reproduced tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableRow {
    Arrowhead(ArrowheadSpec),
    Poisson(MeshSpec),
}

impl TableRow {
    pub fn build(&self) -> Result<SaddleSystem> {
        match self {
            TableRow::Arrowhead(spec) => arrowhead(spec),
            TableRow::Poisson(spec) => poisson_neumann(spec),
        }
    }
}

/// Problem schedule of a table with sizes scaled by `scale` in `(0, 1]`.
///
/// Arrowhead sizes scale linearly in `n`; the Poisson mesh scales `k` by
/// `sqrt(scale)` so that the unknown count scales linearly.
pub fn schedule(table: Table, scale: f64, seed: u64) -> Result<Vec<TableRow>> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::InvalidParameter(format!("scale {scale} outside (0, 1]")));
    }
    Ok(match table {
        Table::ArrowheadGrowth => (1..=20u64)
            .map(|r| {
                let n = ((25_000 * r) as f64 * scale).round().max(2.0) as usize;
                TableRow::Arrowhead(ArrowheadSpec::full(n, seed.wrapping_add(r)))
            })
            .collect(),
        Table::ArrowheadDensity => {
            let n = ((DENSITY_N as f64 * scale).round() as usize).max(2);
            DENSITY_SWEEP
                .iter()
                .zip(1u64..)
                .map(|(&b, r)| {
                    let k = (((b - 1) as f64 / DENSITY_N as f64) * n as f64).round() as usize;
                    TableRow::Arrowhead(ArrowheadSpec {
                        n,
                        b2: RowPattern::Count(k.clamp(1, n)),
                        b1: FirstRow::SameAsB2,
                        c_value: 1.0,
                        seed: seed.wrapping_add(r),
                    })
                })
                .collect()
        }
        Table::PoissonSquare => (0..15usize)
            .map(|r| {
                let k = ((201 + 25 * r) as f64 * scale.sqrt()).round().max(2.0) as usize;
                TableRow::Poisson(MeshSpec { k })
            })
            .collect(),
    })
}

/// Benchmarks every row of a table, optionally running distinct systems on
/// separate threads. Records come back in schedule order.
pub fn reproduce(table: Table, scale: f64, cfg: &RunConfig, parallel: bool) -> Result<Vec<BenchRecord>> {
    let rows = schedule(table, scale, cfg.seed)?;
    let one = |row: &TableRow| -> Result<BenchRecord> { run_bench(&row.build()?, cfg) };
    if !parallel {
        return rows.iter().map(one).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = rows.iter().map(|row| scope.spawn(move || one(row))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("benchmark thread panicked"))
            .collect()
    })
}
