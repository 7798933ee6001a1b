use crate::error::{Error, Result};

use super::dense::DenseMatrix;

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Validates raw CSR arrays.
    pub fn try_new(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        vals: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != rows + 1 || row_ptr[0] != 0 {
            return Err(Error::InvalidStructure("row_ptr must have rows+1 entries starting at 0".into()));
        }
        if row_ptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidStructure("row_ptr is decreasing".into()));
        }
        let nnz = row_ptr[rows];
        if col_idx.len() != nnz || vals.len() != nnz {
            return Err(Error::InvalidStructure(format!(
                "row_ptr[rows] = {nnz} but {} indices and {} values",
                col_idx.len(),
                vals.len()
            )));
        }
        for i in 0..rows {
            let cols_i = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols_i.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!("row {i} columns not strictly increasing")));
            }
            if cols_i.last().is_some_and(|&c| c >= cols) {
                return Err(Error::InvalidStructure(format!("row {i} column index out of range")));
            }
        }
        if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
            let row = row_ptr.partition_point(|&p| p <= k) - 1;
            return Err(Error::NonFinite { row, col: col_idx[k] });
        }
        Ok(Self { rows, cols, row_ptr, col_idx, vals })
    }

    /// Assembles from (row, col, value) triplets; duplicates are summed.
    /// Explicit zeros are kept, so the pattern is exactly the set of
    /// coordinates supplied.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::InvalidStructure(format!("entry ({i}, {j}) outside {rows}x{cols}")));
            }
            per_row[i].push((j, v));
        }
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for mut r in per_row {
            r.sort_by_key(|&(j, _)| j);
            for (j, v) in r {
                if col_idx.len() > *row_ptr.last().unwrap() && *col_idx.last().unwrap() == j {
                    *vals.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self::try_new(rows, cols, row_ptr, col_idx, vals)
    }

    /// Sparse copy of a dense matrix keeping entries with |a_ij| > drop.
    /// Diagonal entries of square matrices are always kept.
    pub fn from_dense(a: &DenseMatrix, drop: f64) -> Self {
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let v = a[(i, j)];
                if v.abs() > drop || (i == j && a.is_square()) {
                    col_idx.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { rows: a.rows(), cols: a.cols(), row_ptr, col_idx, vals }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, row_ptr: (0..=n).collect(), col_idx: (0..n).collect(), vals: vec![1.0; n] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub(crate) fn vals_mut(&mut self) -> &mut [f64] {
        &mut self.vals
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.vals[r])
    }

    /// Entry lookup by binary search; absent entries read as 0.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = self.row(i);
        c.binary_search(&j).map_or(0.0, |k| v[k])
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.row(i).0.binary_search(&j).is_ok()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "csr matvec dimension");
        assert_eq!(y.len(), self.rows, "csr matvec output");
        for (i, yi) in y.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz());
        for i in 0..self.rows {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                t.push((j, i, a));
            }
        }
        Self::from_triplets(self.cols, self.rows, &t).expect("transpose of valid csr")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                d[(i, j)] = a;
            }
        }
        d
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Dense principal submatrix on the (sorted) index set `idx`.
    pub fn principal_submatrix(&self, idx: &[usize]) -> DenseMatrix {
        let mut local = vec![usize::MAX; self.cols];
        for (k, &g) in idx.iter().enumerate() {
            local[g] = k;
        }
        let m = idx.len();
        let mut d = DenseMatrix::zeros(m, m);
        for (li, &gi) in idx.iter().enumerate() {
            let (c, v) = self.row(gi);
            for (&gj, &a) in c.iter().zip(v) {
                let lj = local[gj];
                if lj != usize::MAX {
                    d[(li, lj)] = a;
                }
            }
        }
        d
    }

    /// max |a_ij − a_ji| over the stored pattern and its transpose.
    pub fn max_asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.rows {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                m = m.max((a - self.get(j, i)).abs());
            }
        }
        m
    }
}
