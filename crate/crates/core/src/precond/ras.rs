use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matkit::{lu_factor, CsrMatrix, LuFactors};
use crate::problems::Partition;

use super::{preconditioner_op, CoarseSolve, CoarseSpace, OperatorKind, SpectralOperator, Variant};

/// One overlapping subdomain with its factored local block.
#[derive(Debug, Clone)]
pub struct Subdomain {
    /// Global indices read by the local solve.
    pub overlap: Vec<usize>,
    /// (local position, global index) pairs this subdomain writes.
    pub writes: Vec<(usize, usize)>,
    pub factors: LuFactors,
}

/// Restricted additive Schwarz: y = Σ R̃ᵢᵀ·Aᵢ⁻¹·Rᵢ·x.
#[derive(Debug, Clone)]
pub struct RasPreconditioner {
    n: usize,
    subdomains: Arc<Vec<Subdomain>>,
}

impl RasPreconditioner {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subdomains(&self) -> &[Subdomain] {
        &self.subdomains
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        ras_apply(self, x)
    }

    pub fn as_operator(&self) -> SpectralOperator {
        let m = self.clone();
        SpectralOperator::new(self.n, OperatorKind::Ras, move |x| ras_apply(&m, x))
    }
}

/// Factors the principal submatrix of `a` on every overlap set.
pub fn ras_build(a: &CsrMatrix, p: &Partition) -> Result<RasPreconditioner> {
    if a.rows() != a.cols() || a.rows() != p.n() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix with a partition of {} nodes", a.rows(), a.cols(), p.n())));
    }
    let subdomains = (0..p.nparts())
        .into_par_iter()
        .map(|i| {
            let overlap = p.overlap(i).to_vec();
            let block = a.principal_submatrix(&overlap);
            let factors = lu_factor(&block).map_err(|_| Error::SingularLocalBlock { subdomain: i })?;
            let writes = overlap
                .iter()
                .enumerate()
                .filter(|&(_, &g)| p.owner()[g] == i)
                .map(|(l, &g)| (l, g))
                .collect();
            Ok(Subdomain { overlap, writes, factors })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RasPreconditioner { n: a.rows(), subdomains: Arc::new(subdomains) })
}

/// Local solves run in parallel; each writes only the indices it owns.
/// Subdomains whose restricted input is identically zero are skipped.
pub fn ras_apply(m: &RasPreconditioner, x: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), m.n, "RAS of order {} applied to length {}", m.n, x.len());
    let local: Vec<Option<Vec<f64>>> = m
        .subdomains
        .par_iter()
        .map(|s| {
            let rhs: Vec<f64> = s.overlap.iter().map(|&g| x[g]).collect();
            if rhs.iter().all(|&v| v == 0.0) {
                return None;
            }
            Some(s.factors.solve(&rhs).expect("local dimension fixed at build"))
        })
        .collect();
    let mut y = vec![0.0; m.n];
    for (s, sol) in m.subdomains.iter().zip(local) {
        if let Some(sol) = sol {
            for &(l, g) in &s.writes {
                y[g] = sol[l];
            }
        }
    }
    y
}

/// Â = M⁻¹·A.
pub fn one_level_op(m: &RasPreconditioner, a: &CsrMatrix) -> Result<SpectralOperator> {
    if a.rows() != m.n || a.cols() != m.n {
        return Err(Error::DimensionMismatch(format!("RAS of order {} with a {}x{} matrix", m.n, a.rows(), a.cols())));
    }
    let (m, a) = (m.clone(), a.clone());
    Ok(SpectralOperator::new(a.rows(), OperatorKind::Ras, move |x| ras_apply(&m, &a.matvec(x))))
}

/// x ↦ P(Â)·Â·x with Â = M⁻¹A. `cs` must hold E = Zᵀ·Â·Z.
pub fn two_level_op<Z: CoarseSpace + Clone + 'static>(
    m: &RasPreconditioner,
    a: &CsrMatrix,
    variant: Variant,
    z: &Z,
    cs: &CoarseSolve,
) -> Result<SpectralOperator> {
    let ahat = one_level_op(m, a)?;
    let p = preconditioner_op(variant, &ahat, z, cs)?;
    Ok(p.compose(&ahat)?.with_kind(OperatorKind::TwoLevel))
}

/// Right-hand side P(Â)·M⁻¹·b of the two-level system.
pub fn two_level_rhs<Z: CoarseSpace + Clone + 'static>(
    m: &RasPreconditioner,
    a: &CsrMatrix,
    variant: Variant,
    z: &Z,
    cs: &CoarseSolve,
    b: &[f64],
) -> Result<Vec<f64>> {
    let ahat = one_level_op(m, a)?;
    let p = preconditioner_op(variant, &ahat, z, cs)?;
    p.try_apply(&ras_apply(m, b))
}
