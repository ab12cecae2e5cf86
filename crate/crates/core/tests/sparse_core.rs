mod common;

use common::*;
use densepre::graph::predict_product_nnz;
use densepre::sparse::mtx::{format_matrix_market, parse_matrix_market};
use densepre::sparse::{spgemm, spmv, spmv_transpose, transpose, SparseMatrix, Triplets};
use densepre::Error;
use proptest::prelude::*;

fn from_pattern(rows: &[&[usize]], ncols: usize) -> SparseMatrix {
    let mut t = Triplets::new(rows.len(), ncols);
    for (i, r) in rows.iter().enumerate() {
        for &j in *r {
            t.push(i, j, 1.0);
        }
    }
    SparseMatrix::from_triplets(&t).unwrap()
}

fn layered_a() -> SparseMatrix {
    from_pattern(&[&[1, 3], &[0, 3, 4], &[2], &[0, 1, 4], &[3]], 5)
}

fn layered_b() -> SparseMatrix {
    from_pattern(&[&[0], &[1, 3], &[1, 4], &[2], &[0, 1]], 5)
}

#[test]
fn layered_example_product_pattern() {
    let c = spgemm(&layered_a(), &layered_b()).unwrap();
    let expected = from_pattern(&[&[1, 2, 3], &[0, 1, 2], &[1, 4], &[0, 1, 3], &[2]], 5);
    assert!(c.same_pattern(&expected));
    // the printed product omits (0, 2), which the path 0 -> 3 -> 2 reaches
    assert_eq!(c.nnz(), 12);
    assert_eq!(c.row_nnz(1), 3);
    assert_eq!(product_paths(&layered_a(), &layered_b()).1, 12);
}

#[test]
fn layered_example_row_counts() {
    let a = layered_a();
    assert_eq!(a.nnz(), 10);
    assert_eq!(spmv(&a, &[1.0; 5]).unwrap(), vec![2.0, 3.0, 1.0, 3.0, 1.0]);
    let p = predict_product_nnz(&a, &layered_b()).unwrap();
    assert_eq!(p.row_counts, vec![3, 3, 2, 3, 1]);
}

#[test]
fn duplicates_are_summed() {
    let mut t = Triplets::new(1, 1);
    t.push(0, 0, 1.0);
    t.push(0, 0, 2.0);
    let a = SparseMatrix::from_triplets(&t).unwrap();
    assert_eq!(a.nnz(), 1);
    assert_eq!(a.get(0, 0), Some(3.0));
    assert_eq!(SparseMatrix::from_triplets(&Triplets::new(3, 3)).unwrap().nnz(), 0);
}

#[test]
fn out_of_range_triplet_is_rejected() {
    let mut t = Triplets::new(2, 2);
    t.push(2, 0, 1.0);
    assert!(matches!(SparseMatrix::from_triplets(&t), Err(Error::IndexOutOfRange { .. })));
}

#[test]
fn identity_product_is_bit_identical() {
    let a = random_sparse(&mut rng(4), 12, 9, 0.3);
    assert_eq!(spgemm(&SparseMatrix::identity(12), &a).unwrap(), a);
}

#[test]
fn spgemm_dimension_mismatch() {
    let r = spgemm(&SparseMatrix::zeros(2, 3), &SparseMatrix::zeros(2, 3));
    assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
}

#[test]
fn spmv_trivial_cases() {
    let x = [1.0, -2.0, 3.5];
    assert_eq!(spmv(&SparseMatrix::identity(3), &x).unwrap(), x.to_vec());
    assert_eq!(spmv(&SparseMatrix::zeros(2, 3), &x).unwrap(), vec![0.0; 2]);
    let a = SparseMatrix::from_dense(&[vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 4.0]]);
    assert_eq!(spmv_transpose(&a, &[1.0, 1.0]).unwrap(), vec![1.0, 2.0, 4.0]);
}

#[test]
fn diagonal_transpose_is_itself() {
    let d = SparseMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
    assert_eq!(transpose(&d), d);
}

#[test]
fn matrix_market_round_trip() {
    let mut a = layered_a();
    a = a.scale(std::f64::consts::PI);
    let mut buf = Vec::new();
    format_matrix_market(&a, &mut buf).unwrap();
    let back = parse_matrix_market(buf.as_slice()).unwrap();
    assert_eq!(back, a);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mtx");
    densepre::sparse::write_matrix_market(&a, &path).unwrap();
    assert_eq!(densepre::sparse::read_matrix_market(&path).unwrap(), a);
}

#[test]
fn symmetric_file_is_expanded() {
    let text = "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2.0\n2 1 -1.0\n3 2 -1.0\n";
    let a = parse_matrix_market(text.as_bytes()).unwrap();
    assert_eq!(a.nnz(), 5);
    assert_eq!(a.get(0, 1), Some(-1.0));
    assert_eq!(a.get(1, 2), Some(-1.0));
}

#[test]
fn complex_field_is_unsupported() {
    let text = "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0 0.0\n";
    assert!(matches!(
        parse_matrix_market(text.as_bytes()),
        Err(Error::UnsupportedFormat { line: 1, .. })
    ));
}

#[test]
fn bad_entry_reports_line() {
    let text = "%%MatrixMarket matrix coordinate real general\n% note\n2 2 2\n1 1 1.0\n3 1 1.0\n";
    match parse_matrix_market(text.as_bytes()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
        other => panic!("unexpected {other:?}"),
    }
}

fn arb_matrix(max: usize) -> impl Strategy<Value = SparseMatrix> {
    (1..=max, 1..=max, any::<u64>(), 0.0f64..0.5)
        .prop_map(|(m, n, seed, d)| random_sparse(&mut rng(seed), m, n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transpose_is_an_involution(a in arb_matrix(30)) {
        let t = transpose(&a);
        prop_assert_eq!(t.nnz(), a.nnz());
        prop_assert_eq!(transpose(&t), a);
    }

    #[test]
    fn triplet_order_does_not_matter(a in arb_matrix(20), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut entries: Vec<_> = a.iter().collect();
        entries.shuffle(&mut rng(seed));
        let mut t = Triplets::new(a.nrows(), a.ncols());
        for (i, j, v) in entries {
            t.push(i, j, v);
        }
        prop_assert_eq!(SparseMatrix::from_triplets(&t).unwrap(), a);
    }

    #[test]
    fn product_nnz_matches_path_count(m in 1usize..30, k in 1usize..30, n in 1usize..30, seed in any::<u64>(), d in 0.0f64..0.4) {
        let mut r = rng(seed);
        let a = random_sparse(&mut r, m, k, d);
        let b = random_sparse(&mut r, k, n, d);
        let c = spgemm(&a, &b).unwrap();
        let (rows, total) = product_paths(&a, &b);
        prop_assert_eq!(c.nnz(), total);
        prop_assert_eq!(c.row_counts(), rows.clone());
        prop_assert_eq!(predict_product_nnz(&a, &b).unwrap().row_counts, rows);
    }

    #[test]
    fn product_is_structurally_associative(n in 1usize..30, seed in any::<u64>(), d in 0.0f64..0.3) {
        let mut r = rng(seed);
        let a = random_sparse(&mut r, n, n, d);
        let b = random_sparse(&mut r, n, n, d);
        let c = random_sparse(&mut r, n, n, d);
        let left = spgemm(&spgemm(&a, &b).unwrap(), &c).unwrap();
        let right = spgemm(&a, &spgemm(&b, &c).unwrap()).unwrap();
        prop_assert!(left.same_pattern(&right));
    }

    #[test]
    fn spmv_matches_dense(a in arb_matrix(25), seed in any::<u64>()) {
        use rand::Rng;
        let mut r = rng(seed);
        let x: Vec<f64> = (0..a.ncols()).map(|_| r.gen_range(-1.0..1.0)).collect();
        let y = spmv(&a, &x).unwrap();
        let expected = matvec(&dense(&a), &x);
        for (u, v) in y.iter().zip(&expected) {
            prop_assert!((u - v).abs() <= 1e-14 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn matrix_market_preserves_bits(a in arb_matrix(15)) {
        let mut buf = Vec::new();
        format_matrix_market(&a, &mut buf).unwrap();
        prop_assert_eq!(parse_matrix_market(buf.as_slice()).unwrap(), a);
    }
}
