use std::io;

use thiserror::Error;

use crate::nullbasis::BasisKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("entry ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: unsupported Matrix Market field or format `{what}`")]
    UnsupportedFormat { line: usize, what: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("constraint row has no entry above the drop tolerance")]
    ZeroRow,

    #[error("row {row} of the constraint block is numerically zero on the current null space")]
    RankDeficiency { row: usize },

    #[error("pivot entry {index} of the constraint row is zero")]
    ZeroPivot { index: usize },

    #[error("operation not supported for basis kind {0:?}")]
    UnsupportedBasisKind(BasisKind),

    #[error("matrix is singular: no admissible pivot in column {column}")]
    SingularMatrix { column: usize },

    #[error("reduced system is singular (column {column}); the saddle system is likely not invertible")]
    SingularReducedSystem { column: usize },

    #[error("pivot growth {growth:e} exceeds the instability limit")]
    NumericalInstability { growth: f64 },

    #[error("constraint row {row} is zero but its right-hand side is not")]
    InconsistentConstraint { row: usize },

    #[error("the (2,2) block is nonzero; use the one-sided method")]
    RequiresOneSided,

    #[error("problem size {size} exceeds the dense-oracle limit {limit}")]
    DeskScaleOnly { size: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }
}
