//! Test problems: bordered identity ("arrowhead") systems, random saddle
//! systems and a P1 Poisson problem with pure Neumann boundary conditions.
//!
//! Every generator is deterministic in its seed.

use std::fs;
use std::path::Path;

use rand::distributions::Open01;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::saddle::SaddleSystem;
use crate::sparse::mtx::{read_vector, write_vector};
use crate::sparse::{read_matrix_market, write_matrix_market, SparseMatrix, Triplets};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(Open01)
}

fn uniform_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| uniform(rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowPattern {
    Full,
    /// Fraction of positions in `[0, 1]`, rounded to a count.
    Density(f64),
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstRow {
    /// Independent full random row.
    Full,
    /// The same row as B2.
    SameAsB2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrowheadSpec {
    pub n: usize,
    pub b2: RowPattern,
    pub b1: FirstRow,
    pub c_value: f64,
    pub seed: u64,
}

impl ArrowheadSpec {
    /// Full, independent B1 and B2 with `C = 1`.
    pub fn full(n: usize, seed: u64) -> Self {
        ArrowheadSpec {
            n,
            b2: RowPattern::Full,
            b1: FirstRow::Full,
            c_value: 1.0,
            seed,
        }
    }

    pub fn b2_nnz(&self) -> Result<usize> {
        let k = match self.b2 {
            RowPattern::Full => self.n,
            RowPattern::Count(k) => k,
            RowPattern::Density(d) => {
                if !(0.0..=1.0).contains(&d) {
                    return Err(Error::InvalidParameter(format!("density {d} outside [0, 1]")));
                }
                (d * self.n as f64).round() as usize
            }
        };
        if k > self.n {
            return Err(Error::InvalidParameter(format!(
                "requested {k} nonzeros in a row of length {}",
                self.n
            )));
        }
        Ok(k)
    }
}

/// `A = I`, a random B2 row with the requested pattern, B1 full or equal to B2,
/// `C = [c_value]`, and random `f`, `g`. All random values lie in (0, 1).
pub fn arrowhead(spec: &ArrowheadSpec) -> Result<SaddleSystem> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("arrowhead needs n >= 2, got {n}")));
    }
    let k = spec.b2_nnz()?;
    let mut r = rng(spec.seed);

    let mut pos: Vec<usize> = if k == n {
        (0..n).collect()
    } else {
        sample(&mut r, n, k).into_vec()
    };
    pos.sort_unstable();
    let vals = uniform_vec(&mut r, k);
    let b2 = SparseMatrix::from_csr(1, n, vec![0, k], pos, vals)?;
    let b1 = match spec.b1 {
        FirstRow::SameAsB2 => b2.clone(),
        FirstRow::Full => SparseMatrix::from_csr(1, n, vec![0, n], (0..n).collect(), uniform_vec(&mut r, n))?,
    };
    let c = if spec.c_value == 0.0 {
        SparseMatrix::zeros(1, 1)
    } else {
        SparseMatrix::from_diagonal(&[spec.c_value])
    };
    let f = uniform_vec(&mut r, n);
    let g = uniform_vec(&mut r, 1);
    SaddleSystem::new(SparseMatrix::identity(n), b1, b2, c, f, g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshSpec {
    /// Vertices per side of the unit square.
    pub k: usize,
}

/// P1 finite elements for `-Δu = cos(πx) cos(πy)` on the unit square with
/// natural boundary conditions, made well posed by the mean-zero constraint
/// `Σ (∫φ_i) u_i = 0`.
///
/// The `k x k` vertex grid is numbered row by row (`j * k + i` for the vertex
/// at `(i h, j h)`), and every cell is cut along its diagonal from lower left
/// to upper right. Couplings that vanish exactly are not stored, so interior
/// rows of A have five entries.
pub fn poisson_neumann(spec: &MeshSpec) -> Result<SaddleSystem> {
    let k = spec.k;
    if k < 2 {
        return Err(Error::InvalidParameter(format!("mesh needs k >= 2, got {k}")));
    }
    let n = k * k;
    let h = 1.0 / (k - 1) as f64;
    let area = 0.5 * h * h;
    let vid = |i: usize, j: usize| j * k + i;
    let load = |x: f64, y: f64| (std::f64::consts::PI * x).cos() * (std::f64::consts::PI * y).cos();

    let mut t = Triplets::with_capacity(n, n, 7 * n);
    let mut mass = vec![0.0; n];
    let mut f = vec![0.0; n];
    for j in 0..k - 1 {
        for i in 0..k - 1 {
            // corner offsets in units of h
            let tris: [[(usize, usize); 3]; 2] = [
                [(i, j), (i + 1, j), (i + 1, j + 1)],
                [(i, j), (i + 1, j + 1), (i, j + 1)],
            ];
            for tri in tris {
                let ids = tri.map(|(a, b)| vid(a, b));
                let pts = tri.map(|(a, b)| (a as i64, b as i64));
                // edge opposite each vertex
                let edge = |a: usize| {
                    let (p, q) = (pts[(a + 1) % 3], pts[(a + 2) % 3]);
                    (q.0 - p.0, q.1 - p.1)
                };
                // stiffness entry = (e_a · e_b) / (4 area); with unit legs the area is 1/2
                for a in 0..3 {
                    for b in 0..3 {
                        let (ea, eb) = (edge(a), edge(b));
                        let dot = ea.0 * eb.0 + ea.1 * eb.1;
                        if dot != 0 {
                            t.push(ids[a], ids[b], dot as f64 / 2.0);
                        }
                    }
                }
                for a in 0..3 {
                    mass[ids[a]] += area / 3.0;
                    // edge-midpoint rule; φ_a is 1/2 on its two adjacent midpoints
                    let mid = |b: usize| {
                        let (p, q) = (tri[a], tri[b]);
                        ((p.0 + q.0) as f64 * 0.5 * h, (p.1 + q.1) as f64 * 0.5 * h)
                    };
                    let (m1, m2) = (mid((a + 1) % 3), mid((a + 2) % 3));
                    f[ids[a]] += area / 6.0 * (load(m1.0, m1.1) + load(m2.0, m2.1));
                }
            }
        }
    }
    let a = SparseMatrix::from_triplets(&t)?;
    let b = SparseMatrix::from_csr(1, n, vec![0, n], (0..n).collect(), mass)?;
    SaddleSystem::new(a, b.clone(), b, SparseMatrix::zeros(1, 1), f, vec![0.0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CMode {
    Zero,
    Identity,
    /// `G Gᵀ + I` with `G` a dense random `m x m` matrix.
    RandomSpd,
}

/// Random saddle system.
///
/// A has a random off-diagonal pattern of the given density and a diagonal
/// that dominates each row (1 plus the row's off-diagonal sum). B1 and B2 have
/// the same density and at least one entry per row.
pub fn random_saddle(n: usize, m: usize, density: f64, c_mode: CMode, seed: u64) -> Result<SaddleSystem> {
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= m < n, got m = {m}, n = {n}")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidParameter(format!("density {density} outside (0, 1]")));
    }
    let mut r = rng(seed);
    let mut t = Triplets::new(n, n);
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if j != i && r.gen_bool(density) {
                let v = uniform(&mut r);
                off += v;
                t.push(i, j, v);
            }
        }
        t.push(i, i, 1.0 + off);
    }
    let a = SparseMatrix::from_triplets(&t)?;
    let random_rows = |r: &mut ChaCha8Rng| -> Result<SparseMatrix> {
        let mut t = Triplets::new(m, n);
        for i in 0..m {
            let mut any = false;
            for j in 0..n {
                if r.gen_bool(density) {
                    t.push(i, j, uniform(r));
                    any = true;
                }
            }
            if !any {
                let j = r.gen_range(0..n);
                t.push(i, j, uniform(r));
            }
        }
        SparseMatrix::from_triplets(&t)
    };
    let b1 = random_rows(&mut r)?;
    let b2 = random_rows(&mut r)?;
    let c = match c_mode {
        CMode::Zero => SparseMatrix::zeros(m, m),
        CMode::Identity => SparseMatrix::identity(m),
        CMode::RandomSpd => {
            let g: Vec<Vec<f64>> = (0..m).map(|_| uniform_vec(&mut r, m)).collect();
            let dense: Vec<Vec<f64>> = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            let s: f64 = (0..m).map(|k| g[i][k] * g[j][k]).sum();
                            if i == j {
                                s + 1.0
                            } else {
                                s
                            }
                        })
                        .collect()
                })
                .collect();
            SparseMatrix::from_dense(&dense)
        }
    };
    let f = uniform_vec(&mut r, n);
    let g = uniform_vec(&mut r, m);
    SaddleSystem::new(a, b1, b2, c, f, g)
}

pub const MANIFEST: &str = "manifest.txt";

/// Writes `A.mtx`, `B1.mtx`, `B2.mtx`, `C.mtx`, `f.mtx`, `g.mtx` and a manifest.
pub fn write_system(s: &SaddleSystem, dir: impl AsRef<Path>, manifest: &str) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_matrix_market(&s.a, dir.join("A.mtx"))?;
    write_matrix_market(&s.b1, dir.join("B1.mtx"))?;
    write_matrix_market(&s.b2, dir.join("B2.mtx"))?;
    write_matrix_market(&s.c, dir.join("C.mtx"))?;
    write_vector(&s.f, dir.join("f.mtx"))?;
    write_vector(&s.g, dir.join("g.mtx"))?;
    fs::write(dir.join(MANIFEST), manifest)?;
    Ok(())
}

pub fn read_system(dir: impl AsRef<Path>) -> Result<SaddleSystem> {
    let dir = dir.as_ref();
    SaddleSystem::new(
        read_matrix_market(dir.join("A.mtx"))?,
        read_matrix_market(dir.join("B1.mtx"))?,
        read_matrix_market(dir.join("B2.mtx"))?,
        read_matrix_market(dir.join("C.mtx"))?,
        read_vector(dir.join("f.mtx"))?,
        read_vector(dir.join("g.mtx"))?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_arrowhead_counts() {
        let s = arrowhead(&ArrowheadSpec::full(100, 3)).unwrap();
        assert_eq!(s.assemble().unwrap().nnz(), 3 * 100 + 1);
        assert!(s.b1.values().iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn empty_b2_leaves_one_dense_column() {
        let spec = ArrowheadSpec {
            b2: RowPattern::Density(0.0),
            ..ArrowheadSpec::full(50, 1)
        };
        assert_eq!(arrowhead(&spec).unwrap().assemble().unwrap().nnz(), 2 * 50 + 1);
    }

    #[test]
    fn too_many_nonzeros_rejected() {
        let spec = ArrowheadSpec {
            b2: RowPattern::Count(9),
            ..ArrowheadSpec::full(4, 1)
        };
        assert!(arrowhead(&spec).is_err());
    }

    #[test]
    fn same_seed_same_system() {
        assert_eq!(
            random_saddle(30, 2, 0.2, CMode::RandomSpd, 11).unwrap(),
            random_saddle(30, 2, 0.2, CMode::RandomSpd, 11).unwrap()
        );
    }

    #[test]
    fn smallest_mesh_is_two_triangles() {
        let s = poisson_neumann(&MeshSpec { k: 2 }).unwrap();
        assert_eq!(s.n(), 4);
        let sum: f64 = s.b1.values().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
        let ones = crate::sparse::spmv(&s.a, &[1.0; 4]).unwrap();
        assert!(ones.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn interior_stencil_has_five_points() {
        let s = poisson_neumann(&MeshSpec { k: 5 }).unwrap();
        assert_eq!(s.a.row_nnz(2 * 5 + 2), 5);
        assert_eq!(s.a.get(12, 12), Some(4.0));
    }
}
