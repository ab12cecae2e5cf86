mod common;

use common::*;
use densepre::graph::{column_etree, symbolic_fill_bound};
use densepre::solver::{
    condest, dense_oracle_solve, factorize, sparse_solve, symbolic, SymbolicPlan, DEFAULT_PIVOT_TOL,
};
use densepre::sparse::{SparseMatrix, Triplets};
use densepre::Error;
use proptest::prelude::*;

fn natural_plan(a: &SparseMatrix) -> SymbolicPlan {
    SymbolicPlan {
        col_perm: (0..a.ncols()).collect(),
        etree: column_etree(a),
        predicted_fill: symbolic_fill_bound(a),
    }
}

fn tridiagonal(n: usize) -> SparseMatrix {
    let mut t = Triplets::new(n, n);
    for i in 0..n {
        t.push(i, i, 2.0);
        if i > 0 {
            t.push(i, i - 1, -1.0);
            t.push(i - 1, i, -1.0);
        }
    }
    SparseMatrix::from_triplets(&t).unwrap()
}

fn binom(n: i128, k: i128) -> i128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Exact integer inverse of the order-`n` Hilbert matrix.
fn hilbert_inverse(n: usize) -> Vec<Vec<i128>> {
    let n = n as i128;
    (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    let b = binom(i + j - 2, i - 1);
                    sign * (i + j - 1) * binom(n + i - 1, n - j) * binom(n + j - 1, n - i) * b * b
                })
                .collect()
        })
        .collect()
}

#[test]
fn diagonal_plan_is_identity() {
    let d = SparseMatrix::from_diagonal(&[1.0, 4.0, 2.0, 8.0]);
    let plan = symbolic(&d).unwrap();
    assert_eq!(plan.col_perm, vec![0, 1, 2, 3]);
    assert_eq!(plan.predicted_fill, 4);
}

#[test]
fn tridiagonal_factors_without_fill() {
    let a = tridiagonal(60);
    let plan = natural_plan(&a);
    let lu = factorize(&a, &plan, DEFAULT_PIVOT_TOL).unwrap();
    assert_eq!(lu.nnz(), a.nnz());
    assert!(plan.predicted_fill >= a.nnz());
}

#[test]
fn permutation_matrix_swaps_rows() {
    let a = SparseMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
    let lu = factorize(&a, &natural_plan(&a), 1.0).unwrap();
    assert_eq!(lu.row_perm, vec![1, 0]);
    assert_eq!(lu.l.nnz(), 0);
    assert_eq!(lu.u, SparseMatrix::identity(2));
}

#[test]
fn identity_solve_returns_rhs() {
    let b = [1.0, -2.0, 0.25];
    assert_eq!(sparse_solve(&SparseMatrix::identity(3), &b, DEFAULT_PIVOT_TOL).unwrap(), b.to_vec());
    assert_eq!(dense_oracle_solve(&SparseMatrix::identity(3), &b).unwrap(), b.to_vec());
}

#[test]
fn poisson_1d_recovers_constructed_solution() {
    let a = tridiagonal(100);
    let b = densepre::sparse::spmv(&a, &[1.0; 100]).unwrap();
    let x = sparse_solve(&a, &b, DEFAULT_PIVOT_TOL).unwrap();
    assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-10));
}

#[test]
fn arrowhead_matches_dense_oracle() {
    let s = densepre::generators::arrowhead(&densepre::generators::ArrowheadSpec::full(1000, 5)).unwrap();
    let m = s.assemble().unwrap();
    let rhs = s.rhs();
    let x = sparse_solve(&m, &rhs, DEFAULT_PIVOT_TOL).unwrap();
    let (d, _) = assemble_dense(&s);
    let oracle = gauss_solve(&d, &rhs).unwrap();
    let err = x.iter().zip(&oracle).fold(0.0f64, |e, (a, b)| e.max((a - b).abs()));
    assert!(err <= 1e-9 * max_abs(&oracle), "{err}");
}

#[test]
fn hilbert_matches_exact_inverse() {
    let n = 8;
    let h: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| 1.0 / (i + j + 1) as f64).collect()).collect();
    let b: Vec<f64> = (0..n).map(|i| (i % 3) as f64 - 1.0).collect();
    let inv = hilbert_inverse(n);
    let exact: Vec<f64> = inv
        .iter()
        .map(|row| row.iter().zip(&b).map(|(&v, &bj)| v * bj as i128).sum::<i128>() as f64)
        .collect();
    let a = SparseMatrix::from_dense(&h);
    for x in [
        dense_oracle_solve(&a, &b).unwrap(),
        sparse_solve(&a, &b, 1.0).unwrap(),
    ] {
        let err = x.iter().zip(&exact).fold(0.0f64, |e, (u, v)| e.max((u - v).abs()));
        assert!(err <= 1e-6 * max_abs(&exact), "relative error {}", err / max_abs(&exact));
    }
}

#[test]
fn rank_one_is_singular() {
    let a = SparseMatrix::from_dense(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![3.0, 6.0, 9.0]]);
    assert!(matches!(dense_oracle_solve(&a, &[1.0; 3]), Err(Error::SingularMatrix { .. })));
    let structurally = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![1.0, 0.0]]);
    assert!(matches!(
        factorize(&structurally, &natural_plan(&structurally), 0.1),
        Err(Error::SingularMatrix { column: 1 })
    ));
}

#[test]
fn oracle_refuses_large_input() {
    let a = SparseMatrix::identity(2001);
    assert!(matches!(dense_oracle_solve(&a, &vec![1.0; 2001]), Err(Error::DeskScaleOnly { .. })));
}

#[test]
fn dense_columns_are_ordered_last() {
    let s = densepre::generators::arrowhead(&densepre::generators::ArrowheadSpec::full(400, 2)).unwrap();
    let m = s.assemble().unwrap();
    let plan = symbolic(&m).unwrap();
    assert_eq!(*plan.col_perm.last().unwrap(), 400);
    let lu = factorize(&m, &plan, DEFAULT_PIVOT_TOL).unwrap();
    assert!(lu.nnz() <= 4 * m.nnz());
    // the bound on M is quadratic while the factors stay linear
    assert!(symbolic_fill_bound(&m) > 400 * 400 / 2);
}

#[test]
fn diagonally_dominant_residual() {
    let mut r = rng(17);
    let mut a = dense(&random_sparse(&mut r, 300, 300, 0.02));
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0 + row.iter().map(|v| v.abs()).sum::<f64>();
    }
    let a = SparseMatrix::from_dense(&a);
    let lu = factorize(&a, &symbolic(&a).unwrap(), DEFAULT_PIVOT_TOL).unwrap();
    assert!(lu.relative_residual(&a).unwrap() < 1e-12);
}

fn close_solution(x: &[f64], oracle: &[f64], tol: f64) -> bool {
    let err = x.iter().zip(oracle).fold(0.0f64, |e, (a, b)| e.max((a - b).abs()));
    err <= tol * max_abs(oracle).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factors_reproduce_the_matrix(n in 1usize..60, seed in any::<u64>(), d in 0.0f64..0.3, tol in prop::sample::select(vec![0.1, 0.5, 1.0])) {
        let a = random_with_diagonal(&mut rng(seed), n, d);
        let lu = factorize(&a, &symbolic(&a).unwrap(), tol).unwrap();
        let res = lu.relative_residual(&a).unwrap();
        prop_assert!(res <= 1e-10 * lu.growth.max(1.0), "residual {res}, growth {}", lu.growth);
    }

    #[test]
    fn solve_matches_gaussian_elimination(n in 1usize..50, seed in any::<u64>(), d in 0.0f64..0.4) {
        use rand::Rng;
        let mut r = rng(seed);
        let a = random_with_diagonal(&mut r, n, d);
        let b: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let da = dense(&a);
        prop_assume!(cond1(&da) < 1e6);
        let oracle = gauss_solve(&da, &b).unwrap();
        let lu = factorize(&a, &symbolic(&a).unwrap(), DEFAULT_PIVOT_TOL).unwrap();
        prop_assert!(close_solution(&lu.solve(&b).unwrap(), &oracle, 1e-9));
        let at = densepre::sparse::transpose(&a);
        let oracle_t = gauss_solve(&dense(&at), &b).unwrap();
        prop_assert!(close_solution(&lu.solve_transpose(&b).unwrap(), &oracle_t, 1e-9));
    }

    #[test]
    fn factor_size_within_natural_order_bound(n in 1usize..40, seed in any::<u64>(), d in 0.0f64..0.3, tol in prop::sample::select(vec![0.1, 1.0])) {
        let a = random_with_diagonal(&mut rng(seed), n, d);
        let plan = natural_plan(&a);
        let lu = factorize(&a, &plan, tol).unwrap();
        prop_assert!(lu.nnz() <= plan.predicted_fill);
    }

    #[test]
    fn plans_depend_only_on_pattern(n in 1usize..60, seed in any::<u64>(), d in 0.0f64..0.3) {
        let a = random_with_diagonal(&mut rng(seed), n, d);
        let b = a.scale(-3.5);
        prop_assert_eq!(symbolic(&a).unwrap(), symbolic(&b).unwrap());
    }

    #[test]
    fn condest_brackets_exact_condition(n in 1usize..40, seed in any::<u64>(), d in 0.0f64..0.4) {
        let a = random_with_diagonal(&mut rng(seed), n, d);
        let exact = cond1(&dense(&a));
        let lu = factorize(&a, &symbolic(&a).unwrap(), DEFAULT_PIVOT_TOL).unwrap();
        let est = condest(&a, &lu).unwrap();
        prop_assert!(est <= exact * (1.0 + 1e-8), "{est} > {exact}");
        prop_assert!(est >= exact / 10.0, "{est} << {exact}");
    }
}
