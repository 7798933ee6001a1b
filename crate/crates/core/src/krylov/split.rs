use crate::error::{Error, Result};
use crate::matkit::{norm2, DenseMatrix};
use crate::precond::CoarseSpace;
use crate::problems::Partition;
use crate::spectra::REALNESS_TOL;
use crate::subspace::{orthonormalize, OrthonormalBasis};

use super::RitzSet;

/// Orthonormal columns supported on one owner set.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBlock {
    pub rows: Vec<usize>,
    /// |rows|×r_i
    pub q: DenseMatrix,
    /// Index of the block's first global column.
    pub offset: usize,
}

/// Block-diagonal coarse basis Z: each block lives on the owner set of one
/// subdomain, so distinct blocks are orthogonal and Z has orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitBasis {
    n: usize,
    r: usize,
    blocks: Vec<LocalBlock>,
}

impl SplitBasis {
    pub fn blocks(&self) -> &[LocalBlock] {
        &self.blocks
    }

    /// Block index of every global column.
    pub fn column_owner(&self) -> Vec<usize> {
        self.blocks.iter().enumerate().flat_map(|(b, blk)| std::iter::repeat(b).take(blk.q.cols())).collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut z = DenseMatrix::zeros(self.n, self.r);
        for blk in &self.blocks {
            for j in 0..blk.q.cols() {
                let col = z.col_mut(blk.offset + j);
                for (l, &g) in blk.rows.iter().enumerate() {
                    col[g] = blk.q[(l, j)];
                }
            }
        }
        z
    }

    pub fn to_basis(&self) -> Result<OrthonormalBasis> {
        OrthonormalBasis::try_from_matrix(self.to_dense())
    }

    /// ‖x − Z·Zᵀ·x‖₂ / ‖x‖₂
    pub fn reconstruction_residual(&self, x: &[f64]) -> f64 {
        let p = self.prolong(&self.restrict(x));
        let d: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
        norm2(&d) / norm2(x)
    }
}

impl CoarseSpace for SplitBasis {
    fn n(&self) -> usize {
        self.n
    }

    fn r(&self) -> usize {
        self.r
    }

    fn restrict(&self, x: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; self.r];
        for blk in &self.blocks {
            let local: Vec<f64> = blk.rows.iter().map(|&g| x[g]).collect();
            c[blk.offset..blk.offset + blk.q.cols()].copy_from_slice(&blk.q.matvec_t(&local));
        }
        c
    }

    fn prolong(&self, c: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for blk in &self.blocks {
            let local = blk.q.matvec(&c[blk.offset..blk.offset + blk.q.cols()]);
            for (&g, v) in blk.rows.iter().zip(local) {
                y[g] = v;
            }
        }
        y
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        let blk = self.blocks.iter().find(|b| j >= b.offset && j < b.offset + b.q.cols()).expect("column in range");
        for (l, &g) in blk.rows.iter().enumerate() {
            y[g] = blk.q[(l, j - blk.offset)];
        }
        y
    }
}

/// Restricts the Ritz vectors to each owner set, orthonormalizes every local
/// block with `drop_tol`, and assembles the blocks into Z.
pub fn split_coarse_space(ritz: &RitzSet, p: &Partition, drop_tol: f64) -> Result<SplitBasis> {
    let v = &ritz.vectors;
    if v.rows() != p.n() {
        return Err(Error::DimensionMismatch(format!("Ritz vectors of length {} for a partition of {}", v.rows(), p.n())));
    }
    let scale = ritz.values.iter().fold(0.0_f64, |m, t| m.max(t.abs())).max(f64::MIN_POSITIVE);
    for (index, t) in ritz.values.iter().enumerate() {
        if t.im.abs() > REALNESS_TOL * scale {
            return Err(Error::ComplexRitzVectors { index, imag: t.im });
        }
    }
    let mut blocks = Vec::new();
    let mut offset = 0;
    for i in 0..p.nparts() {
        let rows = p.owned(i).to_vec();
        let mut local = DenseMatrix::zeros(rows.len(), v.cols());
        for j in 0..v.cols() {
            let col = v.col(j);
            for (l, &g) in rows.iter().enumerate() {
                local[(l, j)] = col[g];
            }
        }
        let q = match orthonormalize(&local, drop_tol) {
            Ok(b) => b.into_matrix(),
            Err(Error::EmptyBasis) => continue,
            Err(e) => return Err(e),
        };
        let cols = q.cols();
        blocks.push(LocalBlock { rows, q, offset });
        offset += cols;
    }
    if offset == 0 {
        return Err(Error::EmptyBasis);
    }
    Ok(SplitBasis { n: p.n(), r: offset, blocks })
}
