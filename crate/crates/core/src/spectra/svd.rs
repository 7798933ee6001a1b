use crate::error::{Error, Result};
use crate::matkit::{dot, DenseMatrix};

const MAX_SWEEPS: usize = 80;

/// Singular values, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularValues {
    pub sigmas: Vec<f64>,
}

impl SingularValues {
    pub fn max(&self) -> f64 {
        self.sigmas.first().copied().unwrap_or(0.0)
    }

    /// Smallest of the min(rows, cols) singular values.
    pub fn min(&self) -> f64 {
        self.sigmas.last().copied().unwrap_or(0.0)
    }
}

/// One-sided (Hestenes) Jacobi SVD, values only.
pub fn svd_values(a: &DenseMatrix) -> Result<SingularValues> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::DimensionMismatch("svd of an empty matrix".into()));
    }
    // orthogonalize the columns of the taller orientation
    let mut u = if a.rows() >= a.cols() { a.clone() } else { a.transpose() };
    let n = u.cols();
    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotations = 0usize;
        for p in 0..n {
            for q in p + 1..n {
                let (cp, cq) = u.two_cols_mut(p, q);
                let alpha = dot(cp, cp);
                let beta = dot(cq, cq);
                let gamma = dot(cp, cq);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotations += 1;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (xp, xq) = (*x, *y);
                    *x = c * xp - s * xq;
                    *y = s * xp + c * xq;
                }
            }
        }
        converged = rotations == 0;
    }
    if !converged {
        return Err(Error::NoConvergence { method: "one-sided Jacobi SVD", iterations: MAX_SWEEPS });
    }
    let mut sigmas: Vec<f64> = u.columns().map(|c| dot(c, c).sqrt()).collect();
    sigmas.sort_by(|x, y| y.total_cmp(x));
    Ok(SingularValues { sigmas })
}
