use crate::error::{Error, Result};
use crate::matkit::DenseMatrix;

/// Symmetric inputs must satisfy ‖a − aᵀ‖_F ≤ this · ‖a‖_F.
pub const SYMMETRY_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 80;

/// Eigen-decomposition of a symmetric matrix: ascending eigenvalues and
/// matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

/// Cyclic Jacobi eigensolver.
///
/// Rotations are skipped when |a_pq| ≤ ε·√|a_pp·a_qq|, which keeps tiny
/// eigenvalues accurate relative to their own size rather than to ‖a‖.
pub fn eig_symmetric(a: &DenseMatrix) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("eig_symmetric of {}x{}", a.rows(), a.cols())));
    }
    let asym = a.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let n = a.rows();
    let mut m = a.add(&a.transpose()).scaled(0.5);
    let mut v = DenseMatrix::identity(n);
    let fro = m.frobenius_norm();
    let floor = f64::MIN_POSITIVE / f64::EPSILON;

    let mut converged = n <= 1;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotations = 0usize;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(q, p)];
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                if apq.abs() <= f64::EPSILON * (app.abs() * aqq.abs()).sqrt() || apq.abs() <= floor {
                    continue;
                }
                rotations += 1;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                {
                    let (cp, cq) = m.two_cols_mut(p, q);
                    for k in 0..n {
                        let (x, y) = (cp[k], cq[k]);
                        cp[k] = c * x - s * y;
                        cq[k] = s * x + c * y;
                    }
                }
                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        m[(p, k)] = m[(k, p)];
                        m[(q, k)] = m[(k, q)];
                    }
                }
                let (vp, vq) = v.two_cols_mut(p, q);
                for k in 0..n {
                    let (x, y) = (vp[k], vq[k]);
                    vp[k] = c * x - s * y;
                    vq[k] = s * x + c * y;
                }
            }
        }
        if rotations == 0 || off_diagonal_norm(&m) <= 1e-300 * fro.max(1.0) {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { method: "cyclic Jacobi", iterations: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = v.select_columns(&order);
    Ok(SymmetricEigen { values, vectors })
}

/// Frobenius norm of the strictly off-diagonal part.
pub fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let mut s = 0.0;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}
