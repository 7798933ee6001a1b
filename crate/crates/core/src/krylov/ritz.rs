use crate::error::{Error, Result};
use crate::matkit::{lu_factor, norm2, DenseMatrix};
use crate::spectra::{eig_hessenberg, Eigenvalue, REALNESS_TOL};

use super::ArnoldiData;

/// Ritz pairs (θ, V_m·u) of an Arnoldi decomposition.
#[derive(Debug, Clone)]
pub struct RitzSet {
    pub values: Vec<Eigenvalue>,
    /// n×count, unit 2-norm columns.
    pub vectors: DenseMatrix,
    /// ‖A·v_i − θ_i·v_i‖₂ from the Arnoldi relation.
    pub residuals: Vec<f64>,
}

impl RitzSet {
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn res_max(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(*r))
    }
}

/// The `count` Ritz pairs of smallest |θ| from the leading m×m block of H̄.
///
/// Eigenvectors u of H_m come from inverse iteration with a slightly
/// perturbed shift; only real θ are supported.
pub fn rayleigh_ritz(arnoldi: &ArnoldiData, count: usize) -> Result<RitzSet> {
    let m = arnoldi.m;
    if count > m || count == 0 {
        return Err(Error::InsufficientSubspace { requested: count, available: m });
    }
    if arnoldi.v.cols() < m {
        return Err(Error::DimensionMismatch(format!("{} basis vectors for {m} Arnoldi steps", arnoldi.v.cols())));
    }
    let mut hm = DenseMatrix::zeros(m, m);
    for j in 0..m {
        for i in 0..=(j + 1).min(m - 1) {
            hm[(i, j)] = arnoldi.h[(i, j)];
        }
    }
    let scale = hm.max_abs().max(f64::MIN_POSITIVE);
    let theta = eig_hessenberg(&hm)?.values;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| theta[a].abs().total_cmp(&theta[b].abs()).then(theta[a].im.total_cmp(&theta[b].im)));
    let picked: Vec<Eigenvalue> = order[..count].iter().map(|&k| theta[k]).collect();
    for (index, t) in picked.iter().enumerate() {
        if t.im.abs() > REALNESS_TOL * scale {
            return Err(Error::ComplexRitzVectors { index, imag: t.im });
        }
    }

    let vm = arnoldi.v.select_columns(&(0..m).collect::<Vec<_>>());
    let mut vectors = DenseMatrix::zeros(arnoldi.v.rows(), count);
    let mut residuals = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for (k, t) in picked.iter().enumerate() {
        let y = inverse_iteration(&hm, t.re, scale)?;
        // residual from the Arnoldi relation: ‖H̄·y − θ·[y; 0]‖
        let mut r = vec![0.0; m + 1];
        for j in 0..m {
            for i in 0..=j + 1 {
                r[i] += arnoldi.h[(i, j)] * y[j];
            }
        }
        for i in 0..m {
            r[i] -= t.re * y[i];
        }
        residuals.push(norm2(&r));
        let v = vm.matvec(&y);
        let nv = norm2(&v);
        vectors.col_mut(k).iter_mut().zip(&v).for_each(|(d, s)| *d = s / nv);
        values.push(Eigenvalue::real(t.re));
    }
    Ok(RitzSet { values, vectors, residuals })
}

fn inverse_iteration(h: &DenseMatrix, theta: f64, scale: f64) -> Result<Vec<f64>> {
    let m = h.rows();
    let mut offset = 1e-10 * theta.abs() + 1e-13 * scale;
    for _attempt in 0..8 {
        let shifted = h.sub(&DenseMatrix::identity(m).scaled(theta + offset));
        if let Ok(f) = lu_factor(&shifted) {
            let mut y: Vec<f64> = (0..m).map(|i| 1.0 + ((i * 37) % 11) as f64 / 11.0).collect();
            for _ in 0..6 {
                y = f.solve(&y)?;
                let ny = norm2(&y);
                if !ny.is_finite() || ny == 0.0 {
                    break;
                }
                y.iter_mut().for_each(|v| *v /= ny);
            }
            if y.iter().all(|v| v.is_finite()) {
                return Ok(y);
            }
        }
        offset *= 10.0;
    }
    Err(Error::NoConvergence { method: "inverse iteration", iterations: 8 })
}
