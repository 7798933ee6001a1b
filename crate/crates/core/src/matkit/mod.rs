//! Dense and sparse matrix kernels, factorizations and norms.

mod csr;
mod dense;
mod lu;
pub mod mm;

pub use csr::CsrMatrix;
pub use dense::{axpy, dot, norm2, DenseMatrix};
pub use lu::{ilu0, lu_factor, solve_lu, DenseLu, LuFactors, SparseLu, PIVOT_THRESHOLD};

use crate::error::{Error, Result};
use crate::spectra::svd_values;

/// Spectral norm σ_max(a).
pub fn two_norm(a: &DenseMatrix) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::DimensionMismatch("two_norm of an empty matrix".into()));
    }
    Ok(svd_values(a)?.max())
}
