//! Exact dense LU with partial pivoting and unpivoted sparse ILU(0).

use crate::error::{Error, Result};

use super::csr::CsrMatrix;
use super::dense::{axpy, DenseMatrix};

/// Pivots smaller than this fraction of max|a_ij| are treated as singular.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// Factors produced by [`lu_factor`] or [`ilu0`].
#[derive(Debug, Clone)]
pub enum LuFactors {
    Dense(DenseLu),
    Sparse(SparseLu),
}

/// P·A = L·U packed in one column-major matrix; `perm[i]` is the original
/// row placed at position `i`.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

/// ILU(0) factors sharing the sparsity pattern of the input matrix.
#[derive(Debug, Clone)]
pub struct SparseLu {
    lu: CsrMatrix,
    diag_pos: Vec<usize>,
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        match self {
            LuFactors::Dense(f) => f.lu.rows(),
            LuFactors::Sparse(f) => f.lu.rows(),
        }
    }

    /// Unit lower-triangular factor as a dense matrix.
    pub fn l_dense(&self) -> DenseMatrix {
        match self {
            LuFactors::Dense(f) => {
                let n = f.lu.rows();
                let mut l = DenseMatrix::identity(n);
                for j in 0..n {
                    for i in j + 1..n {
                        l[(i, j)] = f.lu[(i, j)];
                    }
                }
                l
            }
            LuFactors::Sparse(f) => f.l().to_dense(),
        }
    }

    /// Upper-triangular factor as a dense matrix.
    pub fn u_dense(&self) -> DenseMatrix {
        match self {
            LuFactors::Dense(f) => {
                let n = f.lu.rows();
                let mut u = DenseMatrix::zeros(n, n);
                for j in 0..n {
                    for i in 0..=j {
                        u[(i, j)] = f.lu[(i, j)];
                    }
                }
                u
            }
            LuFactors::Sparse(f) => f.u().to_dense(),
        }
    }

    /// Row permutation; identity for ILU(0).
    pub fn perm(&self) -> Vec<usize> {
        match self {
            LuFactors::Dense(f) => f.perm.clone(),
            LuFactors::Sparse(f) => (0..f.lu.rows()).collect(),
        }
    }

    /// Product L·U (without the permutation).
    pub fn reconstruct(&self) -> DenseMatrix {
        self.l_dense().matmul(&self.u_dense())
    }

    /// Dense inverse of L·U (of P⁻¹·L·U for pivoted factors), column by column.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.dim();
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let x = self.solve(&e).expect("dimension checked");
            inv.col_mut(j).copy_from_slice(&x);
            e[j] = 0.0;
        }
        inv
    }

    /// Forward and back substitution.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("rhs of length {} for order {}", b.len(), self.dim())));
        }
        Ok(match self {
            LuFactors::Dense(f) => f.solve(b),
            LuFactors::Sparse(f) => f.solve(b),
        })
    }
}

/// Forward/back substitution against `f`.
pub fn solve_lu(f: &LuFactors, b: &[f64]) -> Result<Vec<f64>> {
    f.solve(b)
}

impl DenseLu {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            if xj != 0.0 {
                let col = &self.lu.col(j)[j + 1..];
                axpy(-xj, col, &mut x[j + 1..]);
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.lu[(j, j)];
            let xj = x[j];
            if xj != 0.0 {
                let col = &self.lu.col(j)[..j];
                axpy(-xj, col, &mut x[..j]);
            }
        }
        x
    }

    pub fn packed(&self) -> &DenseMatrix {
        &self.lu
    }
}

impl SparseLu {
    /// Strictly-lower part plus an explicit unit diagonal.
    pub fn l(&self) -> CsrMatrix {
        let n = self.lu.rows();
        let mut t = Vec::new();
        for i in 0..n {
            let (c, v) = self.lu.row(i);
            for (&j, &a) in c.iter().zip(v) {
                if j < i {
                    t.push((i, j, a));
                }
            }
            t.push((i, i, 1.0));
        }
        CsrMatrix::from_triplets(n, n, &t).expect("valid pattern")
    }

    pub fn u(&self) -> CsrMatrix {
        let n = self.lu.rows();
        let mut t = Vec::new();
        for i in 0..n {
            let (c, v) = self.lu.row(i);
            for (&j, &a) in c.iter().zip(v) {
                if j >= i {
                    t.push((i, j, a));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, &t).expect("valid pattern")
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let (rp, ci, va) = (self.lu.row_ptr(), self.lu.col_idx(), self.lu.vals());
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in rp[i]..self.diag_pos[i] {
                s -= va[k] * x[ci[k]];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let d = self.diag_pos[i];
            let mut s = x[i];
            for k in d + 1..rp[i + 1] {
                s -= va[k] * x[ci[k]];
            }
            x[i] = s / va[d];
        }
        x
    }
}

/// LU factorization with partial pivoting.
pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("lu_factor of {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let threshold = PIVOT_THRESHOLD * a.max_abs();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, pmax) = lu.col(k)[k..]
            .iter()
            .enumerate()
            .fold((k, -1.0), |(bi, bv), (i, v)| if v.abs() > bv { (k + i, v.abs()) } else { (bi, bv) });
        if pmax <= threshold || pmax == 0.0 {
            return Err(Error::SingularMatrix { step: k, pivot: pmax });
        }
        if p != k {
            perm.swap(p, k);
            for j in 0..n {
                let col = lu.col_mut(j);
                col.swap(p, k);
            }
        }
        let piv = lu[(k, k)];
        for v in &mut lu.col_mut(k)[k + 1..] {
            *v /= piv;
        }
        for j in k + 1..n {
            let ukj = lu[(k, j)];
            if ukj != 0.0 {
                let (lcol, tcol) = lu.two_cols_mut(k, j);
                axpy(-ukj, &lcol[k + 1..], &mut tcol[k + 1..]);
            }
        }
    }
    Ok(LuFactors::Dense(DenseLu { lu, perm }))
}

/// Incomplete LU with zero fill (IKJ variant). A zero pivot is reported,
/// never shifted.
pub fn ilu0(a: &CsrMatrix) -> Result<LuFactors> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!("ilu0 of {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let rp = lu.row_ptr().to_vec();
    let ci = lu.col_idx().to_vec();
    let mut diag_pos = Vec::with_capacity(n);
    for i in 0..n {
        match ci[rp[i]..rp[i + 1]].binary_search(&i) {
            Ok(k) => diag_pos.push(rp[i] + k),
            Err(_) => return Err(Error::ZeroPivot { row: i }),
        }
    }
    let vals = lu.vals_mut();
    // position of column j in the current row, usize::MAX when absent
    let mut pos = vec![usize::MAX; n];
    for i in 0..n {
        for k in rp[i]..rp[i + 1] {
            pos[ci[k]] = k;
        }
        for kk in rp[i]..diag_pos[i] {
            let k = ci[kk];
            let pivot = vals[diag_pos[k]];
            let lik = vals[kk] / pivot;
            vals[kk] = lik;
            for kj in diag_pos[k] + 1..rp[k + 1] {
                let p = pos[ci[kj]];
                if p != usize::MAX {
                    vals[p] -= lik * vals[kj];
                }
            }
        }
        for k in rp[i]..rp[i + 1] {
            pos[ci[k]] = usize::MAX;
        }
        if vals[diag_pos[i]] == 0.0 {
            return Err(Error::ZeroPivot { row: i });
        }
    }
    Ok(LuFactors::Sparse(SparseLu { lu, diag_pos }))
}
