mod common;

use common::*;
use densepre::generators::{arrowhead, ArrowheadSpec, FirstRow, RowPattern};
use densepre::graph::{column_etree, dense_threshold, detect_dense_rows, symbolic_counts, symbolic_fill_bound};
use densepre::sparse::{SparseMatrix, Triplets};
use densepre::SaddleSystem;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn arrowhead_m(n: usize, b2: usize, seed: u64) -> SparseMatrix {
    let spec = ArrowheadSpec {
        n,
        b2: RowPattern::Count(b2),
        b1: FirstRow::Full,
        c_value: 1.0,
        seed,
    };
    arrowhead(&spec).unwrap().assemble().unwrap()
}

/// Etree parents read off the dense Cholesky pattern of `aᵀa`.
fn etree_oracle(a: &SparseMatrix) -> Vec<Option<usize>> {
    let n = a.ncols();
    let p = pattern(a);
    let mut s = vec![vec![false; n]; n];
    for row in &p {
        for i in 0..n {
            for j in 0..n {
                s[i][j] |= row[i] && row[j];
            }
        }
    }
    for k in 0..n {
        let below: Vec<usize> = (k + 1..n).filter(|&i| s[i][k]).collect();
        for &i in &below {
            for &j in &below {
                s[i][j] = true;
            }
        }
    }
    (0..n).map(|k| (k + 1..n).find(|&i| s[i][k])).collect()
}

#[test]
fn small_arrowhead_bound_matches_householder_oracle() {
    let m = arrowhead_m(50, 5, 3);
    let counts = symbolic_counts(&m);
    let (r, v) = householder_counts(&m);
    assert_eq!(counts.r_nnz, cholesky_ata_nnz(&m));
    assert_eq!((counts.r_nnz, counts.v_nnz), (r, v));
    assert_eq!(symbolic_fill_bound(&m), r + v - m.ncols());
    assert_eq!(column_etree(&m).height, 6);
}

#[test]
fn diagonal_has_bound_n() {
    let d = SparseMatrix::from_diagonal(&[3.0; 40]);
    assert_eq!(symbolic_fill_bound(&d), 40);
    assert_eq!(column_etree(&d).height, 1);
    assert!(detect_dense_rows(&d).is_empty());
}

#[test]
fn identity_with_one_full_row_is_flagged() {
    let n = 10_000;
    let mut t = Triplets::new(n, n);
    for i in 0..n {
        t.push(i, i, 1.0);
        t.push(7, i, 1.0);
    }
    let a = SparseMatrix::from_triplets(&t).unwrap();
    let report = detect_dense_rows(&a);
    assert_eq!(report.threshold, 1000);
    assert_eq!(report.dense_rows, vec![7]);
    assert!(report.dense_cols.is_empty());
    assert_eq!(column_etree(&a).height, n);
}

#[test]
fn threshold_rounds_up() {
    assert_eq!(dense_threshold(10_000), 1000);
    assert_eq!(dense_threshold(2), 15);
    assert_eq!(dense_threshold(25_001), 1582);
}

#[test]
fn constraint_row_density_against_threshold() {
    let sparse_row = arrowhead_m(10_000, 944, 1);
    let dense_row = arrowhead_m(10_000, 2210, 1);
    assert!(!detect_dense_rows(&sparse_row).dense_rows.contains(&10_000));
    assert!(detect_dense_rows(&dense_row).dense_rows.contains(&10_000));
    // B1ᵀ is a full column in both
    assert_eq!(detect_dense_rows(&sparse_row).dense_cols, vec![10_000]);
}

#[test]
fn fill_bound_on_arrowheads_with_growing_constraint_row() {
    for (b2, height, bound) in [
        (0, 2, 20_001),
        (10, 11, 20_056),
        (99, 100, 24_951),
        (944, 945, 466_041),
        (2210, 2211, 2_463_156),
    ] {
        let m = arrowhead_m(10_000, b2, 13);
        assert_eq!(column_etree(&m).height, height, "|B2| = {b2}");
        assert_eq!(symbolic_fill_bound(&m), bound, "|B2| = {b2}");
    }
}

fn nested_arrowheads(n: usize, seed: u64) -> Vec<SparseMatrix> {
    let mut r = rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut r);
    let b1 = SparseMatrix::row_vector(&vec![0.5; n]);
    (0..=n)
        .step_by(n / 8)
        .map(|k| {
            let mut row = vec![0.0; n];
            for &j in &order[..k] {
                row[j] = 1.0;
            }
            let s = SaddleSystem::new(
                SparseMatrix::identity(n),
                b1.clone(),
                SparseMatrix::row_vector(&row),
                SparseMatrix::identity(1),
                vec![0.0; n],
                vec![0.0],
            )
            .unwrap();
            s.assemble().unwrap()
        })
        .collect()
}

#[test]
fn height_and_bound_grow_with_constraint_row() {
    let ms = nested_arrowheads(120, 9);
    let stats: Vec<(usize, usize)> = ms
        .iter()
        .map(|m| (column_etree(m).height, symbolic_fill_bound(m)))
        .collect();
    for w in stats.windows(2) {
        assert!(w[0].0 <= w[1].0 && w[0].1 <= w[1].1, "{stats:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn etree_matches_cholesky_pattern(n in 1usize..30, seed in any::<u64>(), d in 0.0f64..0.3) {
        let a = random_with_diagonal(&mut rng(seed), n, d);
        let t = column_etree(&a);
        let oracle = etree_oracle(&a);
        prop_assert_eq!(&t.parent, &oracle);
        prop_assert_eq!(t.height, forest_height(&oracle));
        for (j, p) in t.parent.iter().enumerate() {
            if let Some(p) = p {
                prop_assert!(*p > j);
            }
        }
    }

    #[test]
    fn counts_match_dense_factorization(n in 1usize..30, seed in any::<u64>(), d in 0.0f64..0.3) {
        let a = random_with_diagonal(&mut rng(seed), n, d);
        let c = symbolic_counts(&a);
        prop_assert_eq!(c.r_nnz, cholesky_ata_nnz(&a));
        // row merging realizes a subset of the cholesky structure; equality needs strong Hall
        let (r, v) = householder_counts(&a);
        prop_assert!(r <= c.r_nnz && v <= c.v_nnz, "merge ({r}, {v}) vs bound ({}, {})", c.r_nnz, c.v_nnz);
        prop_assert!(c.lu_bound() >= a.nnz());
    }

    #[test]
    fn full_row_forces_full_chain(n in 2usize..40, row in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let mut a = dense(&random_with_diagonal(&mut rng(seed), n, 0.05));
        let i = row.index(n);
        a[i] = vec![1.0; n];
        let m = SparseMatrix::from_dense(&a);
        prop_assert_eq!(column_etree(&m).height, n);
        prop_assert_eq!(symbolic_counts(&m).r_nnz, n * (n + 1) / 2);
    }
}
