use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matkit::{ilu0, lu_factor, two_norm, CsrMatrix, DenseMatrix, LuFactors};
use crate::spectra::svd_values;
use crate::subspace::OrthonormalBasis;

use super::SpectralOperator;

/// A coarse basis Z seen through its two products.
pub trait CoarseSpace: Send + Sync {
    fn n(&self) -> usize;
    fn r(&self) -> usize;
    /// Zᵀ·x
    fn restrict(&self, x: &[f64]) -> Vec<f64>;
    /// Z·c
    fn prolong(&self, c: &[f64]) -> Vec<f64>;
    /// Column j of Z.
    fn column(&self, j: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.r()];
        e[j] = 1.0;
        self.prolong(&e)
    }
}

impl CoarseSpace for OrthonormalBasis {
    fn n(&self) -> usize {
        OrthonormalBasis::n(self)
    }

    fn r(&self) -> usize {
        OrthonormalBasis::r(self)
    }

    fn restrict(&self, x: &[f64]) -> Vec<f64> {
        self.q().matvec_t(x)
    }

    fn prolong(&self, c: &[f64]) -> Vec<f64> {
        self.q().matvec(c)
    }

    fn column(&self, j: usize) -> Vec<f64> {
        self.q().col(j).to_vec()
    }
}

/// Above this size ‖·‖₂ of the r×r coarse matrices is estimated by power
/// iteration instead of a dense SVD.
pub const DENSE_NORM_LIMIT: usize = 400;

/// How E⁻¹ is applied.
#[derive(Debug, Clone)]
pub enum InverseMode {
    Exact(LuFactors),
    Ilu0(LuFactors),
    /// An explicitly supplied H̃⁻¹.
    Explicit(DenseMatrix),
}

/// The projection matrix E = ZᵀAZ and the rule used to apply its inverse.
#[derive(Debug, Clone)]
pub struct CoarseSolve {
    e: Arc<DenseMatrix>,
    mode: Arc<InverseMode>,
}

/// ρ₁ = E·H⁻¹ − I and ρ₂ = H⁻¹·E − I measured in the 2-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoNorms {
    pub rho1: f64,
    pub rho2: f64,
}

impl CoarseSolve {
    /// LU-factored E.
    pub fn exact(e: DenseMatrix) -> Result<Self> {
        let f = lu_factor(&e).map_err(|err| Error::SingularProjection(err.to_string()))?;
        Ok(Self { e: Arc::new(e), mode: Arc::new(InverseMode::Exact(f)) })
    }

    /// E with H̃⁻¹ given explicitly.
    pub fn explicit(e: DenseMatrix, h_inv: DenseMatrix) -> Result<Self> {
        if !e.is_square() || h_inv.rows() != e.rows() || h_inv.cols() != e.cols() {
            return Err(Error::DimensionMismatch(format!(
                "E is {}x{}, H̃⁻¹ is {}x{}",
                e.rows(),
                e.cols(),
                h_inv.rows(),
                h_inv.cols()
            )));
        }
        Ok(Self { e: Arc::new(e), mode: Arc::new(InverseMode::Explicit(h_inv)) })
    }

    /// E with its inverse replaced by the ILU(0) factors of its sparse form.
    pub fn ilu(e: DenseMatrix) -> Result<Self> {
        let f = ilu0(&CsrMatrix::from_dense(&e, 0.0))?;
        Ok(Self { e: Arc::new(e), mode: Arc::new(InverseMode::Ilu0(f)) })
    }

    /// Same E, ILU(0) inverse.
    pub fn to_ilu(&self) -> Result<Self> {
        Self::ilu((*self.e).clone())
    }

    pub fn e(&self) -> &DenseMatrix {
        &self.e
    }

    pub fn e_sparse(&self) -> CsrMatrix {
        CsrMatrix::from_dense(&self.e, 0.0)
    }

    pub fn mode(&self) -> &InverseMode {
        &self.mode
    }

    pub fn r(&self) -> usize {
        self.e.rows()
    }

    /// Applies E⁻¹ (or its stand-in) to y.
    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        match &*self.mode {
            InverseMode::Exact(f) | InverseMode::Ilu0(f) => f.solve(y).expect("coarse dimension checked at construction"),
            InverseMode::Explicit(h) => h.matvec(y),
        }
    }

    /// Dense form of the applied inverse H⁻¹ (E⁻¹ in exact mode).
    pub fn inverse_dense(&self) -> DenseMatrix {
        match &*self.mode {
            InverseMode::Exact(f) | InverseMode::Ilu0(f) => f.inverse(),
            InverseMode::Explicit(h) => h.clone(),
        }
    }

    pub fn rho_norms(&self) -> Result<RhoNorms> {
        let h = self.inverse_dense();
        let i = DenseMatrix::identity(self.r());
        let rho1 = self.e.matmul(&h).sub(&i);
        let rho2 = h.matmul(&self.e).sub(&i);
        Ok(RhoNorms { rho1: matrix_two_norm(&rho1)?, rho2: matrix_two_norm(&rho2)? })
    }

    /// (‖E‖₂, ‖E⁻¹‖₂) of the exact E.
    pub fn e_norms(&self) -> Result<(f64, f64)> {
        if self.r() <= DENSE_NORM_LIMIT {
            let s = svd_values(&self.e)?;
            Ok((s.max(), 1.0 / s.min()))
        } else {
            let inv = lu_factor(&self.e)?.inverse();
            Ok((power_two_norm(&self.e), power_two_norm(&inv)))
        }
    }
}

/// ‖a‖₂: dense SVD for small matrices, power iteration on aᵀa above
/// [`DENSE_NORM_LIMIT`].
pub fn matrix_two_norm(a: &DenseMatrix) -> Result<f64> {
    if a.rows().max(a.cols()) <= DENSE_NORM_LIMIT {
        two_norm(a)
    } else {
        Ok(power_two_norm(a))
    }
}

fn power_two_norm(a: &DenseMatrix) -> f64 {
    let n = a.cols();
    // deterministic start with no special alignment
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0).collect();
    let mut sigma = 0.0;
    for _ in 0..2000 {
        let nx = crate::matkit::norm2(&x);
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = a.matvec(&x);
        let s = crate::matkit::norm2(&y);
        x = a.matvec_t(&y);
        if (s - sigma).abs() <= 1e-13 * s {
            return s;
        }
        sigma = s;
    }
    sigma
}

/// E = ZᵀAZ assembled from r operator applications, LU-factored.
pub fn build_projection<Z: CoarseSpace + ?Sized>(a_op: &SpectralOperator, z: &Z) -> Result<CoarseSolve> {
    CoarseSolve::exact(assemble_projection(a_op, z)?)
}

/// The dense E = ZᵀAZ without factoring it.
pub fn assemble_projection<Z: CoarseSpace + ?Sized>(a_op: &SpectralOperator, z: &Z) -> Result<DenseMatrix> {
    if a_op.n() != z.n() {
        return Err(Error::DimensionMismatch(format!("operator {} vs coarse space {}", a_op.n(), z.n())));
    }
    let r = z.r();
    let cols: Vec<Vec<f64>> = (0..r).into_par_iter().map(|j| z.restrict(&a_op.apply(&z.column(j)))).collect();
    DenseMatrix::from_columns(r, &cols)
}

/// x ↦ Z·E⁻¹·Zᵀ·x as a closure-friendly helper.
pub(crate) fn coarse_term(z: &dyn CoarseSpace, cs: &CoarseSolve, x: &[f64]) -> Vec<f64> {
    z.prolong(&cs.solve(&z.restrict(x)))
}
