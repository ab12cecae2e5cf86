//! Null-space prestructuring of sparse saddle-point systems.
//!
//! A saddle-point matrix whose constraint block holds a dense row makes the
//! symbolic phase of a sparse direct solver expensive and its fill estimates
//! useless. Replacing the constrained unknowns by a sparse null-space basis
//! removes the dense row before the solver sees it.

pub mod bench;
pub mod error;
pub mod generators;
pub mod graph;
pub mod nullbasis;
pub mod saddle;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use nullbasis::{BasisKind, BasisOptions, NullBasis};
pub use saddle::{Mode, PrestructureResult, SaddleSolution, SaddleSystem, Target};
pub use sparse::{SparseMatrix, Triplets};
