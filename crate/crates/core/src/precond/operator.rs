use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matkit::{CsrMatrix, DenseMatrix};

/// Largest dimension [`SpectralOperator::to_dense`] will materialize.
pub const MATERIALIZE_LIMIT: usize = 2100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    PlainMatrix,
    Composed,
    Deflation,
    CoarseCorrection,
    AdaptedDeflation,
    Ras,
    TwoLevel,
}

type ApplyFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A square linear operator known only through its action.
#[derive(Clone)]
pub struct SpectralOperator {
    n: usize,
    kind: OperatorKind,
    apply: Arc<ApplyFn>,
}

impl fmt::Debug for SpectralOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralOperator").field("n", &self.n).field("kind", &self.kind).finish()
    }
}

impl SpectralOperator {
    pub fn new<F>(n: usize, kind: OperatorKind, apply: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self { n, kind, apply: Arc::new(apply) }
    }

    pub fn from_dense(a: DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("operator from {}x{} matrix", a.rows(), a.cols())));
        }
        Ok(Self::new(a.rows(), OperatorKind::PlainMatrix, move |x| a.matvec(x)))
    }

    pub fn from_csr(a: CsrMatrix) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch(format!("operator from {}x{} matrix", a.rows(), a.cols())));
        }
        Ok(Self::new(a.rows(), OperatorKind::PlainMatrix, move |x| a.matvec(x)))
    }

    pub fn from_diag(d: Vec<f64>) -> Self {
        Self::new(d.len(), OperatorKind::PlainMatrix, move |x| d.iter().zip(x).map(|(a, b)| a * b).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, OperatorKind::PlainMatrix, |x| x.to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// y = Op·x. Panics on a length mismatch; use [`Self::try_apply`] to check.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "operator of dimension {} applied to a vector of length {}", self.n, x.len());
        (self.apply)(x)
    }

    pub fn try_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!("operator {} vs vector {}", self.n, x.len())));
        }
        Ok((self.apply)(x))
    }

    /// x ↦ self(inner(x)).
    pub fn compose(&self, inner: &SpectralOperator) -> Result<SpectralOperator> {
        if self.n != inner.n {
            return Err(Error::DimensionMismatch(format!("compose {} with {}", self.n, inner.n)));
        }
        let (outer, inner) = (self.apply.clone(), inner.apply.clone());
        Ok(Self::new(self.n, OperatorKind::Composed, move |x| outer(&inner(x))))
    }

    pub fn with_kind(mut self, kind: OperatorKind) -> Self {
        self.kind = kind;
        self
    }

    /// Applies the operator to every identity column.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        if self.n > MATERIALIZE_LIMIT {
            return Err(Error::TooLargeToMaterialize { n: self.n, limit: MATERIALIZE_LIMIT });
        }
        let mut out = DenseMatrix::zeros(self.n, self.n);
        let mut e = vec![0.0; self.n];
        for j in 0..self.n {
            e[j] = 1.0;
            let col = (self.apply)(&e);
            out.col_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        Ok(out)
    }
}
