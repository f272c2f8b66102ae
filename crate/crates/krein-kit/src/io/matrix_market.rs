//! Matrix Market exchange format, array and coordinate flavors, real
//! general/symmetric.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::IoError;
use crate::linalg::{DenseMatrix, SparseSymMatrix};

/// A parsed Matrix Market file.
#[derive(Debug, Clone)]
pub struct MmMatrix {
    pub rows: usize,
    pub cols: usize,
    pub symmetric: bool,
    pub storage: MmStorage,
}

#[derive(Debug, Clone)]
pub enum MmStorage {
    /// Column-major dense payload, as the array format specifies.
    Array(Vec<f64>),
    /// 0-based triplets. For symmetric files only the stored triangle appears.
    Coordinate(Vec<(usize, usize, f64)>),
}

impl MmMatrix {
    pub fn to_dense(&self) -> DenseMatrix {
        match &self.storage {
            MmStorage::Array(data) => {
                let mut m = DenseMatrix::zeros(self.rows, self.cols);
                for j in 0..self.cols {
                    for i in 0..self.rows {
                        m[(i, j)] = data[j * self.rows + i];
                    }
                }
                if self.symmetric {
                    for i in 0..self.rows {
                        for j in 0..i {
                            m[(j, i)] = m[(i, j)];
                        }
                    }
                }
                m
            }
            MmStorage::Coordinate(trip) => {
                let mut m = DenseMatrix::zeros(self.rows, self.cols);
                for &(i, j, v) in trip {
                    m[(i, j)] += v;
                    if self.symmetric && i != j {
                        m[(j, i)] += v;
                    }
                }
                m
            }
        }
    }

    pub fn to_sparse(&self) -> Result<SparseSymMatrix, IoError> {
        if self.rows != self.cols {
            return Err(IoError::Unsupported {
                what: format!("sparse conversion of non-square {}x{}", self.rows, self.cols),
            });
        }
        let mut trip = Vec::new();
        match &self.storage {
            MmStorage::Array(data) => {
                for j in 0..self.cols {
                    for i in 0..self.rows {
                        let v = data[j * self.rows + i];
                        if v != 0.0 {
                            trip.push((i, j, v));
                            if self.symmetric && i != j {
                                trip.push((j, i, v));
                            }
                        }
                    }
                }
            }
            MmStorage::Coordinate(t) => {
                for &(i, j, v) in t {
                    trip.push((i, j, v));
                    if self.symmetric && i != j {
                        trip.push((j, i, v));
                    }
                }
            }
        }
        Ok(SparseSymMatrix::from_triplets(self.rows, &trip)?)
    }
}

/// Write a dense matrix in array format. With `symmetric`, only the lower
/// triangle is stored and the matrix must be square.
pub fn write_dense<W: Write>(
    w: &mut W,
    m: &DenseMatrix,
    symmetric: bool,
) -> Result<(), IoError> {
    let shape = if symmetric { "symmetric" } else { "general" };
    if symmetric && !m.is_square() {
        return Err(IoError::Unsupported { what: "symmetric layout for non-square matrix".into() });
    }
    writeln!(w, "%%MatrixMarket matrix array real {shape}")?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for j in 0..m.cols() {
        let i0 = if symmetric { j } else { 0 };
        for i in i0..m.rows() {
            writeln!(w, "{:.17e}", m[(i, j)])?;
        }
    }
    Ok(())
}

/// Write a sparse matrix in coordinate format (1-based indices on disk). With
/// `symmetric`, only the lower triangle is stored.
pub fn write_sparse<W: Write>(
    w: &mut W,
    m: &SparseSymMatrix,
    symmetric: bool,
) -> Result<(), IoError> {
    let shape = if symmetric { "symmetric" } else { "general" };
    let entries: Vec<(usize, usize, f64)> = m
        .triplets()
        .filter(|&(i, j, _)| !symmetric || j <= i)
        .collect();
    writeln!(w, "%%MatrixMarket matrix coordinate real {shape}")?;
    writeln!(w, "{} {} {}", m.dim(), m.dim(), entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// Parse a Matrix Market stream.
pub fn read<R: Read>(r: R) -> Result<MmMatrix, IoError> {
    let mut lines = BufReader::new(r).lines();
    let header = lines
        .next()
        .ok_or_else(|| IoError::Parse { line: 1, message: "empty file".into() })??;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 5 || tokens[0] != "%%MatrixMarket" || tokens[1] != "matrix" {
        return Err(IoError::Parse {
            line: 1,
            message: "header must start with `%%MatrixMarket matrix`".into(),
        });
    }
    let layout = tokens[2];
    let field = tokens[3];
    let shape = tokens[4];
    if field != "real" && field != "integer" {
        return Err(IoError::Unsupported { what: format!("field `{field}` (only real data)") });
    }
    let symmetric = match shape {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(IoError::Unsupported { what: format!("symmetry class `{other}`") });
        }
    };

    let mut line_no = 1usize;
    let mut size_line = None;
    for line in lines.by_ref() {
        let line = line?;
        line_no += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some((line_no, trimmed.to_string()));
        break;
    }
    let (size_line_no, size_line) = size_line.ok_or(IoError::Parse {
        line: line_no,
        message: "missing size line".into(),
    })?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| IoError::Parse { line: size_line_no, message: e.to_string() })?;

    match layout {
        "array" => {
            if dims.len() != 2 {
                return Err(IoError::Parse {
                    line: size_line_no,
                    message: "array size line must be `rows cols`".into(),
                });
            }
            let (rows, cols) = (dims[0], dims[1]);
            let expected = if symmetric {
                if rows != cols {
                    return Err(IoError::Parse {
                        line: size_line_no,
                        message: "symmetric array must be square".into(),
                    });
                }
                cols * (cols + 1) / 2
            } else {
                rows * cols
            };
            let mut values = Vec::with_capacity(expected);
            for line in lines {
                let line = line?;
                line_no += 1;
                let t = line.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                for tok in t.split_whitespace() {
                    let v: f64 = tok
                        .parse()
                        .map_err(|e: std::num::ParseFloatError| IoError::Parse {
                            line: line_no,
                            message: e.to_string(),
                        })?;
                    values.push(v);
                }
            }
            if values.len() != expected {
                return Err(IoError::Parse {
                    line: line_no,
                    message: format!("expected {expected} array entries, found {}", values.len()),
                });
            }
            // expand a packed symmetric column payload into a full one
            let data = if symmetric {
                let mut full = vec![0.0; rows * cols];
                let mut it = values.into_iter();
                for j in 0..cols {
                    for i in j..rows {
                        let v = it.next().expect("length checked");
                        full[j * rows + i] = v;
                        full[i * rows + j] = v;
                    }
                }
                full
            } else {
                values
            };
            Ok(MmMatrix { rows, cols, symmetric, storage: MmStorage::Array(data) })
        }
        "coordinate" => {
            if dims.len() != 3 {
                return Err(IoError::Parse {
                    line: size_line_no,
                    message: "coordinate size line must be `rows cols nnz`".into(),
                });
            }
            let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
            let mut trip = Vec::with_capacity(nnz);
            for line in lines {
                let line = line?;
                line_no += 1;
                let t = line.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                let mut parts = t.split_whitespace();
                let (i, j, v) = (
                    parts.next().and_then(|x| x.parse::<usize>().ok()),
                    parts.next().and_then(|x| x.parse::<usize>().ok()),
                    parts.next().and_then(|x| x.parse::<f64>().ok()),
                );
                let (Some(i), Some(j), Some(v)) = (i, j, v) else {
                    return Err(IoError::Parse {
                        line: line_no,
                        message: format!("bad coordinate entry `{t}`"),
                    });
                };
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(IoError::Parse {
                        line: line_no,
                        message: format!("index ({i},{j}) outside {rows}x{cols}"),
                    });
                }
                trip.push((i - 1, j - 1, v));
            }
            if trip.len() != nnz {
                return Err(IoError::Parse {
                    line: line_no,
                    message: format!("expected {nnz} entries, found {}", trip.len()),
                });
            }
            Ok(MmMatrix { rows, cols, symmetric, storage: MmStorage::Coordinate(trip) })
        }
        other => Err(IoError::Unsupported { what: format!("layout `{other}`") }),
    }
}

pub fn read_path(path: &Path) -> Result<MmMatrix, IoError> {
    let file = std::fs::File::open(path).map_err(|e| IoError::File {
        path: path.display().to_string(),
        source: e,
    })?;
    read(file)
}

pub fn write_dense_path(path: &Path, m: &DenseMatrix, symmetric: bool) -> Result<(), IoError> {
    let mut file = std::fs::File::create(path).map_err(|e| IoError::File {
        path: path.display().to_string(),
        source: e,
    })?;
    write_dense(&mut file, m, symmetric)
}
