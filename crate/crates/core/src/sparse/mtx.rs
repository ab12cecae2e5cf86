//! Matrix Market coordinate I/O (real, general or symmetric).
//!
//! Indices are 1-based on disk. Values are written with 17 significant
//! digits so that a write/read cycle reproduces every `f64` exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{SparseMatrix, Triplets};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let file = File::open(path)?;
    parse_matrix_market(BufReader::new(file))
}

pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let header = header?;
    let symmetry = parse_header(&header)?;

    // size line, skipping comments and blank lines
    let mut size = None;
    for (idx, line) in lines.by_ref() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let nums: Vec<&str> = t.split_whitespace().collect();
        if nums.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected `nrows ncols nnz`, found `{t}`"),
            });
        }
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("invalid size field `{s}`"),
            })
        };
        size = Some((parse(nums[0])?, parse(nums[1])?, parse(nums[2])?));
        break;
    }
    let (nrows, ncols, nnz) = size.ok_or(Error::Parse {
        line: 1,
        msg: "missing size line".into(),
    })?;
    if symmetry == Symmetry::Symmetric && nrows != ncols {
        return Err(Error::Parse {
            line: 1,
            msg: "symmetric matrix must be square".into(),
        });
    }

    let cap = if symmetry == Symmetry::Symmetric { 2 * nnz } else { nnz };
    let mut t = Triplets::with_capacity(nrows, ncols, cap);
    let mut seen = 0usize;
    for (idx, line) in lines {
        let line = line?;
        let s = line.trim();
        if s.is_empty() || s.starts_with('%') {
            continue;
        }
        let lineno = idx + 1;
        if seen == nnz {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("more than the declared {nnz} entries"),
            });
        }
        let mut it = s.split_whitespace();
        let (i, j, v) = match (it.next(), it.next(), it.next(), it.next()) {
            (Some(i), Some(j), Some(v), None) => (i, j, v),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected `row col value`, found `{s}`"),
                })
            }
        };
        let index = |s: &str, bound: usize| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(k) if k >= 1 && k <= bound => Ok(k - 1),
                Ok(k) => Err(Error::Parse {
                    line: lineno,
                    msg: format!("index {k} outside 1..={bound}"),
                }),
                Err(_) => Err(Error::Parse {
                    line: lineno,
                    msg: format!("invalid index `{s}`"),
                }),
            }
        };
        let i = index(i, nrows)?;
        let j = index(j, ncols)?;
        let v: f64 = v.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("invalid value `{v}`"),
        })?;
        t.push(i, j, v);
        if symmetry == Symmetry::Symmetric && i != j {
            t.push(j, i, v);
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(Error::Parse {
            line: 0,
            msg: format!("declared {nnz} entries, found {seen}"),
        });
    }
    SparseMatrix::from_triplets(&t)
}

fn parse_header(header: &str) -> Result<Symmetry> {
    let lower = header.trim().to_ascii_lowercase();
    let fields: Vec<&str> = lower.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("malformed header `{}`", header.trim()),
        });
    }
    if fields[2] != "coordinate" {
        return Err(Error::UnsupportedFormat {
            line: 1,
            what: fields[2].to_string(),
        });
    }
    if fields[3] != "real" {
        return Err(Error::UnsupportedFormat {
            line: 1,
            what: fields[3].to_string(),
        });
    }
    match fields[4] {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        other => Err(Error::UnsupportedFormat {
            line: 1,
            what: other.to_string(),
        }),
    }
}

pub fn write_matrix_market(a: &SparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    format_matrix_market(a, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn format_matrix_market<W: Write>(a: &SparseMatrix, w: &mut W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (i, j, v) in a.iter() {
        writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// Writes a dense vector as an `n x 1` coordinate matrix with every entry stored.
pub fn write_vector(x: &[f64], path: impl AsRef<Path>) -> Result<()> {
    write_matrix_market(&SparseMatrix::column_vector_full(x), path)
}

/// Reads an `n x 1` coordinate matrix back into a dense vector (missing entries are zero).
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let m = read_matrix_market(path)?;
    if m.ncols() != 1 {
        return Err(Error::Parse {
            line: 2,
            msg: format!("expected a single column, found {}", m.ncols()),
        });
    }
    let mut x = vec![0.0; m.nrows()];
    for (i, _, v) in m.iter() {
        x[i] = v;
    }
    Ok(x)
}
