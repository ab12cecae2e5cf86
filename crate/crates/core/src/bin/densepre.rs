use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use densepre::bench::{self, BenchMode, RunConfig, Table};
use densepre::generators::{
    arrowhead, poisson_neumann, random_saddle, read_system, write_system, ArrowheadSpec, CMode, FirstRow, MeshSpec,
    RowPattern,
};
use densepre::graph::{detect_dense_rows, symbolic_counts};
use densepre::saddle::{
    prestructure_one_sided, prestructure_two_sided, solve_one_sided, solve_standard, solve_two_sided,
    PrestructureResult, SaddleSolution, SaddleSystem, Target,
};
use densepre::sparse::mtx::write_vector;
use densepre::sparse::{read_matrix_market, write_matrix_market};
use densepre::{BasisOptions, Error};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "densepre", version, about = "Null-space prestructuring of sparse saddle-point systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a test system as a directory of Matrix Market files
    Generate {
        #[command(subcommand)]
        problem: Problem,
    },
    /// Report dense rows, column elimination tree height and fill bound
    Analyze {
        /// System directory or single .mtx file
        path: PathBuf,
    },
    /// Build the reduced system and report its size
    Prestructure {
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = PreMode::Auto)]
        mode: PreMode,
        #[command(flatten)]
        basis: BasisArgs,
        /// Directory for reduced.mtx and rhs.mtx
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a system and write x.mtx and y.mtx
    Solve {
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMode::Auto)]
        mode: SolveMode,
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long, default_value_t = densepre::solver::DEFAULT_PIVOT_TOL)]
        pivot_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time prestructured and standard solves, one CSV row per system
    Bench {
        #[arg(required = true)]
        systems: Vec<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Benchmark distinct systems concurrently
        #[arg(long)]
        parallel_systems: bool,
    },
    /// Regenerate one of the statistics tables at reduced size
    Reproduce {
        #[arg(value_enum)]
        table: TableArg,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        parallel_systems: bool,
    },
}

#[derive(Subcommand)]
enum Problem {
    /// Identity bordered by one constraint row and column
    Arrowhead {
        #[arg(long)]
        n: usize,
        /// Fraction of nonzeros in B2 (default: full)
        #[arg(long, conflicts_with = "b_nnz")]
        b_density: Option<f64>,
        /// Number of nonzeros in B2
        #[arg(long)]
        b_nnz: Option<usize>,
        /// Use B1 = B2 instead of an independent full B1
        #[arg(long)]
        same_rows: bool,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, env = "DENSEPRE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// P1 Poisson problem with Neumann boundary and mean-zero constraint
    Poisson {
        /// Vertices per side of the unit square
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random sparse saddle system
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 0.1)]
        density: f64,
        #[arg(long, value_enum, default_value_t = CArg::Zero)]
        c_mode: CArg,
        #[arg(long, env = "DENSEPRE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone, Copy)]
struct BasisArgs {
    /// Entries with magnitude at or below eps count as zero
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Scale null-basis columns to unit 2-norm
    #[arg(long)]
    normalize_columns: bool,
}

impl BasisArgs {
    fn options(self) -> BasisOptions {
        BasisOptions {
            eps: self.eps,
            normalize_columns: self.normalize_columns,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    #[command(flatten)]
    basis: BasisArgs,
    #[arg(long, default_value_t = densepre::solver::DEFAULT_PIVOT_TOL)]
    pivot_tol: f64,
    #[arg(long, env = "DENSEPRE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
}

impl RunArgs {
    fn config(self) -> RunConfig {
        RunConfig {
            mode: match self.mode {
                ModeArg::TwoSided => BenchMode::TwoSided,
                ModeArg::OneSidedRow => BenchMode::OneSidedRow,
                ModeArg::OneSidedCol => BenchMode::OneSidedCol,
                ModeArg::Standard => BenchMode::Standard,
                ModeArg::Both => BenchMode::Both,
            },
            basis: self.basis.options(),
            pivot_tol: self.pivot_tol,
            seed: self.seed,
            repeats: self.repeats,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    TwoSided,
    OneSidedRow,
    OneSidedCol,
    Standard,
    Both,
}

#[derive(ValueEnum, Clone, Copy)]
enum PreMode {
    /// Two-sided when C is zero, row one-sided otherwise
    Auto,
    TwoSided,
    OneSidedRow,
    OneSidedCol,
}

#[derive(ValueEnum, Clone, Copy)]
enum SolveMode {
    Auto,
    TwoSided,
    OneSidedRow,
    OneSidedCol,
    Standard,
}

#[derive(ValueEnum, Clone, Copy)]
enum CArg {
    Zero,
    Identity,
    RandomSpd,
}

#[derive(ValueEnum, Clone, Copy)]
#[value(rename_all = "snake_case")]
enum TableArg {
    ArrowheadGrowth,
    ArrowheadDensity,
    PoissonSquare,
}

enum Failure {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(_) | Error::Parse { .. } | Error::UnsupportedFormat { .. } => Failure::Io(msg),
            Error::InvalidParameter(_)
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::InvalidStructure(_)
            | Error::RequiresOneSided
            | Error::UnsupportedBasisKind(_)
            | Error::DeskScaleOnly { .. } => Failure::Usage(msg),
            _ => Failure::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Generate { problem } => generate(problem),
        Command::Analyze { path } => analyze(&path),
        Command::Prestructure {
            system,
            mode,
            basis,
            out,
        } => {
            let s = read_system(&system)?;
            let p = prestructure(&s, mode, &basis.options())?;
            let nnz_m = s.assemble()?.nnz();
            println!("mode          {:?}", p.mode);
            println!("reduced       {} x {}", p.reduced.nrows(), p.reduced.ncols());
            println!("nnz(M)        {nnz_m}");
            println!("nnz(reduced)  {}", p.reduced.nnz());
            println!("infl          {:.4}", p.reduced.nnz() as f64 / nnz_m as f64);
            if let Some(z) = p.z2.as_ref().or(p.z1.as_ref()) {
                println!("max |ratio|   {:e}", z.max_abs_ratio);
            }
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                write_matrix_market(&p.reduced, dir.join("reduced.mtx"))?;
                write_vector(&p.rhs, dir.join("rhs.mtx"))?;
            }
            Ok(())
        }
        Command::Solve {
            system,
            mode,
            basis,
            pivot_tol,
            out,
        } => {
            let s = read_system(&system)?;
            let sol = solve(&s, mode, &basis.options(), pivot_tol)?;
            println!("residual_inf  {:e}", sol.residual_inf);
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                write_vector(&sol.x, dir.join("x.mtx"))?;
                write_vector(&sol.y, dir.join("y.mtx"))?;
            }
            Ok(())
        }
        Command::Bench {
            systems,
            run,
            out,
            parallel_systems,
        } => {
            let cfg = run.config();
            let bench_one = |path: &PathBuf| -> Result<bench::BenchRecord, Failure> {
                Ok(bench::run_bench(&read_system(path)?, &cfg)?)
            };
            let records: Vec<_> = if parallel_systems {
                std::thread::scope(|scope| {
                    let hs: Vec<_> = systems.iter().map(|p| scope.spawn(move || bench_one(p))).collect();
                    hs.into_iter().map(|h| h.join().expect("benchmark thread panicked")).collect()
                })
            } else {
                systems.iter().map(bench_one).collect()
            };
            emit(records.into_iter().collect::<Result<Vec<_>, _>>()?, out.as_deref())
        }
        Command::Reproduce {
            table,
            scale,
            run,
            out,
            parallel_systems,
        } => {
            let table = match table {
                TableArg::ArrowheadGrowth => Table::ArrowheadGrowth,
                TableArg::ArrowheadDensity => Table::ArrowheadDensity,
                TableArg::PoissonSquare => Table::PoissonSquare,
            };
            let records = bench::reproduce(table, scale, &run.config(), parallel_systems)?;
            emit(records, out.as_deref())
        }
    }
}

fn emit(records: Vec<bench::BenchRecord>, out: Option<&Path>) -> Result<(), Failure> {
    let csv = bench::write_csv(&records);
    match out {
        Some(path) => fs::write(path, csv)?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    match records.iter().find_map(|r| r.error.as_ref()) {
        Some(e) => Err(Failure::Numerical(e.clone())),
        None => Ok(()),
    }
}

fn generate(problem: Problem) -> Result<(), Failure> {
    match problem {
        Problem::Arrowhead {
            n,
            b_density,
            b_nnz,
            same_rows,
            c,
            seed,
            out,
        } => {
            let b2 = match (b_density, b_nnz) {
                (_, Some(k)) => RowPattern::Count(k),
                (Some(d), None) => RowPattern::Density(d),
                (None, None) => RowPattern::Full,
            };
            let spec = ArrowheadSpec {
                n,
                b2,
                b1: if same_rows { FirstRow::SameAsB2 } else { FirstRow::Full },
                c_value: c,
                seed,
            };
            let s = arrowhead(&spec)?;
            let manifest = format!(
                "problem = arrowhead\nn = {n}\nb2 = {b2:?}\nb1 = {:?}\nc = {c}\nseed = {seed}\n",
                spec.b1
            );
            write_system(&s, &out, &manifest)?;
        }
        Problem::Poisson { k, out } => {
            let s = poisson_neumann(&MeshSpec { k })?;
            write_system(&s, &out, &format!("problem = poisson_neumann\nk = {k}\n"))?;
        }
        Problem::Random {
            n,
            m,
            density,
            c_mode,
            seed,
            out,
        } => {
            let mode = match c_mode {
                CArg::Zero => CMode::Zero,
                CArg::Identity => CMode::Identity,
                CArg::RandomSpd => CMode::RandomSpd,
            };
            let s = random_saddle(n, m, density, mode, seed)?;
            let manifest =
                format!("problem = random_saddle\nn = {n}\nm = {m}\ndensity = {density}\nc_mode = {mode:?}\nseed = {seed}\n");
            write_system(&s, &out, &manifest)?;
        }
    }
    Ok(())
}

fn analyze(path: &Path) -> Result<(), Failure> {
    let m = if path.is_dir() {
        read_system(path)?.assemble()?
    } else {
        read_matrix_market(path)?
    };
    let report = detect_dense_rows(&m);
    println!("size          {} x {}", m.nrows(), m.ncols());
    println!("nnz           {}", m.nnz());
    println!("threshold     {}", report.threshold);
    println!("dense rows    {:?}", report.dense_rows);
    println!("dense cols    {:?}", report.dense_cols);
    let counts = symbolic_counts(&m);
    println!("etree height  {}", counts.etree.height);
    if m.nrows() == m.ncols() {
        println!("fill bound    {}", counts.lu_bound());
    }
    Ok(())
}

fn prestructure(s: &SaddleSystem, mode: PreMode, opts: &BasisOptions) -> Result<PrestructureResult, Failure> {
    Ok(match mode {
        PreMode::Auto if s.c_is_zero() => prestructure_two_sided(s, opts)?,
        PreMode::Auto => prestructure_one_sided(s, Target::Row, opts)?,
        PreMode::TwoSided => prestructure_two_sided(s, opts)?,
        PreMode::OneSidedRow => prestructure_one_sided(s, Target::Row, opts)?,
        PreMode::OneSidedCol => prestructure_one_sided(s, Target::Column, opts)?,
    })
}

fn solve(s: &SaddleSystem, mode: SolveMode, opts: &BasisOptions, pivot_tol: f64) -> Result<SaddleSolution, Failure> {
    let pre = match mode {
        SolveMode::Standard => return Ok(solve_standard(s, pivot_tol)?),
        SolveMode::Auto => PreMode::Auto,
        SolveMode::TwoSided => PreMode::TwoSided,
        SolveMode::OneSidedRow => PreMode::OneSidedRow,
        SolveMode::OneSidedCol => PreMode::OneSidedCol,
    };
    let p = prestructure(s, pre, opts)?;
    Ok(match p.mode {
        densepre::Mode::TwoSided => solve_two_sided(&p, s, pivot_tol)?,
        _ => solve_one_sided(&p, s, pivot_tol)?,
    })
}
