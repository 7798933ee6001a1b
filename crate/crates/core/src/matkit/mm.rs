//! Matrix Market reader/writer (`coordinate` and `array`, `real`,
//! `general` and `symmetric`).

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::fmt::sci16;

use super::csr::CsrMatrix;
use super::dense::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
}

/// A matrix as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum MarketMatrix {
    Coordinate(CsrMatrix),
    Array(DenseMatrix),
}

impl MarketMatrix {
    pub fn to_csr(&self) -> CsrMatrix {
        match self {
            MarketMatrix::Coordinate(a) => a.clone(),
            MarketMatrix::Array(d) => CsrMatrix::from_dense(d, 0.0),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            MarketMatrix::Coordinate(a) => a.to_dense(),
            MarketMatrix::Array(d) => d.clone(),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse(format!("line {line}: {}", msg.into()))
}

pub fn read<R: BufRead>(reader: R) -> Result<MarketMatrix> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, format!("bad header `{header}`")));
    }
    let coordinate = match tokens[2].as_str() {
        "coordinate" => true,
        "array" => false,
        f => return Err(parse_err(1, format!("unsupported format `{f}`"))),
    };
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field `{}`", tokens[3])));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        s => return Err(parse_err(1, format!("unsupported symmetry `{s}`"))),
    };

    let mut data_lines = lines.filter_map(|(k, l)| match l {
        Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('%') => None,
        Ok(s) => Some(Ok((k + 1, s))),
        Err(e) => Some(Err(Error::from(e))),
    });
    let (sline, size) = data_lines.next().ok_or_else(|| parse_err(2, "missing size line"))??;
    let size: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(sline, format!("bad size token `{t}`"))))
        .collect::<Result<_>>()?;

    if coordinate {
        let [rows, cols, nnz] = size[..] else {
            return Err(parse_err(sline, "coordinate size line needs rows cols nnz"));
        };
        let mut t = Vec::with_capacity(if symmetry == Symmetry::Symmetric { 2 * nnz } else { nnz });
        for _ in 0..nnz {
            let (ln, s) = data_lines.next().ok_or_else(|| parse_err(sline, "too few entries"))??;
            let mut it = s.split_whitespace();
            let mut next = |what: &str| it.next().ok_or_else(|| parse_err(ln, format!("missing {what}")));
            let i: usize = next("row")?.parse().map_err(|_| parse_err(ln, "bad row index"))?;
            let j: usize = next("col")?.parse().map_err(|_| parse_err(ln, "bad column index"))?;
            let v: f64 = next("value")?.parse().map_err(|_| parse_err(ln, "bad value"))?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(parse_err(ln, format!("index ({i}, {j}) out of range")));
            }
            t.push((i - 1, j - 1, v));
            if symmetry == Symmetry::Symmetric && i != j {
                t.push((j - 1, i - 1, v));
            }
        }
        Ok(MarketMatrix::Coordinate(CsrMatrix::from_triplets(rows, cols, &t)?))
    } else {
        let [rows, cols] = size[..] else {
            return Err(parse_err(sline, "array size line needs rows cols"));
        };
        let mut values = Vec::new();
        for item in data_lines {
            let (ln, s) = item?;
            for tok in s.split_whitespace() {
                values.push(tok.parse::<f64>().map_err(|_| parse_err(ln, format!("bad value `{tok}`")))?);
            }
        }
        let mut d = DenseMatrix::zeros(rows, cols);
        match symmetry {
            Symmetry::General => {
                if values.len() != rows * cols {
                    return Err(parse_err(sline, format!("expected {} values, found {}", rows * cols, values.len())));
                }
                d = DenseMatrix::from_col_major(rows, cols, values)?;
            }
            Symmetry::Symmetric => {
                if rows != cols || values.len() != rows * (rows + 1) / 2 {
                    return Err(parse_err(sline, "symmetric array needs the lower triangle of a square matrix"));
                }
                let mut k = 0;
                for j in 0..cols {
                    for i in j..rows {
                        d[(i, j)] = values[k];
                        d[(j, i)] = values[k];
                        k += 1;
                    }
                }
            }
        }
        Ok(MarketMatrix::Array(d))
    }
}

pub fn read_path(path: &std::path::Path) -> Result<MarketMatrix> {
    let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read(std::io::BufReader::new(f))
}

/// Writes a sparse matrix in coordinate format. With `Symmetric`, only the
/// lower triangle is emitted; the caller guarantees symmetry.
pub fn write_coordinate<W: Write>(mut w: W, a: &CsrMatrix, symmetry: Symmetry) -> Result<()> {
    let mut entries = Vec::new();
    for i in 0..a.rows() {
        let (c, v) = a.row(i);
        for (&j, &x) in c.iter().zip(v) {
            if symmetry == Symmetry::General || j <= i {
                entries.push((i, j, x));
            }
        }
    }
    let sym = match symmetry {
        Symmetry::General => "general",
        Symmetry::Symmetric => "symmetric",
    };
    writeln!(w, "%%MatrixMarket matrix coordinate real {sym}")?;
    writeln!(w, "{} {} {}", a.rows(), a.cols(), entries.len())?;
    for (i, j, x) in entries {
        writeln!(w, "{} {} {}", i + 1, j + 1, sci16(x))?;
    }
    Ok(())
}

pub fn write_array<W: Write>(mut w: W, a: &DenseMatrix) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", a.rows(), a.cols())?;
    for v in a.data() {
        writeln!(w, "{}", sci16(*v))?;
    }
    Ok(())
}
