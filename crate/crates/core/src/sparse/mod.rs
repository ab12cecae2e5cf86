//! Sparse storage, arithmetic kernels and Matrix Market I/O.

mod matrix;
pub mod mtx;
pub mod ops;

pub use matrix::{SparseMatrix, Triplets};
pub use mtx::{read_matrix_market, write_matrix_market};
pub use ops::{add, norm_inf, spgemm, spmv, spmv_transpose, transpose, triple_product};
