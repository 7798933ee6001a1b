use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matkit::DenseMatrix;
use crate::precond::SpectralOperator;
use crate::subspace::{angle, orthonormalize, AngleReport, OrthonormalBasis, DEFAULT_DROP_TOL};

/// Number of small eigenvalues 1e-7 … 1e-1 targeted by the coarse space.
pub const SMALL_COUNT: usize = 7;
/// Size of the full diagonal problem.
pub const FULL_N: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Full,
    Truncated(usize),
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "full" {
            return Ok(Scale::Full);
        }
        if let Some(n) = s.strip_prefix("trunc:") {
            let n = n.parse().map_err(|_| Error::Parse(format!("bad truncation size in `{s}`")))?;
            return Ok(Scale::Truncated(n));
        }
        Err(Error::Parse(format!("unknown scale `{s}` (expected full or trunc:<n>)")))
    }
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scale::Full => write!(f, "full"),
            Scale::Truncated(n) => write!(f, "trunc:{n}"),
        }
    }
}

/// The diagonal test matrix diag(1e-7, …, 1e-1, 1, 10, 10.1, …, 209.1).
#[derive(Debug, Clone)]
pub struct DiagonalTestCase {
    pub n: usize,
    pub diag: Vec<f64>,
    pub small_count: usize,
    /// e₁ … e₇
    pub exact_basis: OrthonormalBasis,
    pub rhs: Vec<f64>,
}

impl DiagonalTestCase {
    pub fn operator(&self) -> SpectralOperator {
        SpectralOperator::from_diag(self.diag.clone())
    }

    pub fn matrix(&self) -> DenseMatrix {
        DenseMatrix::from_diag(&self.diag)
    }

    /// Eigenvalues captured by the exact basis.
    pub fn lambda_small(&self) -> &[f64] {
        &self.diag[..self.small_count]
    }

    /// The remaining eigenvalues.
    pub fn lambda_perp(&self) -> &[f64] {
        &self.diag[self.small_count..]
    }

    pub fn norm(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Full: n = 2000 with tail 10.0, 10.1, …, 209.1. Truncated(n): the seven
/// small entries, the 1, and n − 8 evenly spaced values from 10 to 209.1.
pub fn diag_case(scale: Scale) -> Result<DiagonalTestCase> {
    let mut diag: Vec<f64> = (1..=7).rev().map(|k| 10f64.powi(-k)).collect();
    diag.push(1.0);
    match scale {
        Scale::Full => diag.extend((0..FULL_N - 8).map(|k| (100 + k) as f64 / 10.0)),
        Scale::Truncated(n) => {
            if n < 15 {
                return Err(Error::DimensionMismatch(format!("truncated diagonal case needs n >= 15, got {n}")));
            }
            let m = n - 8;
            diag.extend((0..m).map(|k| (100.0 + 1991.0 * k as f64 / (m - 1) as f64) / 10.0));
        }
    }
    let n = diag.len();
    let exact_basis = OrthonormalBasis::unit_vectors(n, &(0..SMALL_COUNT).collect::<Vec<_>>())?;
    Ok(DiagonalTestCase { n, diag, small_count: SMALL_COUNT, exact_basis, rhs: vec![1.0; n] })
}

/// span{v + rand/ε} with rand uniform(0,1) drawn column by column from a
/// seeded stream, orthonormalized, and its angle to v.
pub fn perturb_basis(v: &OrthonormalBasis, eps: f64, seed: u64) -> Result<(OrthonormalBasis, AngleReport)> {
    if !(eps > 0.0) {
        return Err(Error::DimensionMismatch(format!("perturbation scale must be positive, got {eps}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = v.q().data().iter().map(|x| x + rng.gen::<f64>() / eps).collect();
    let z = orthonormalize(&DenseMatrix::from_col_major(v.n(), v.r(), data)?, DEFAULT_DROP_TOL)?;
    if z.r() != v.r() {
        return Err(Error::EmptyBasis);
    }
    let a = angle(&z, v)?;
    Ok((z, a))
}

/// H̃ = Ẽ + rand/ε with rand uniform(0,1), seeded.
pub fn perturb_matrix(e: &DenseMatrix, eps: f64, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = e.data().iter().map(|x| x + rng.gen::<f64>() / eps).collect();
    DenseMatrix::from_col_major(e.rows(), e.cols(), data).expect("finite perturbation")
}
