//! Orthonormal bases, subspace angles and Ritz residuals.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matkit::{axpy, dot, norm2, DenseMatrix};
use crate::precond::SpectralOperator;
use crate::spectra::{eig_symmetric, svd_values};

pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// Tolerance on ‖qᵀq − I‖_F accepted by [`OrthonormalBasis::try_from_matrix`].
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// An n×r matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    q: DenseMatrix,
}

impl OrthonormalBasis {
    /// Wraps `q` after checking ‖qᵀq − I‖_F ≤ 1e-10.
    pub fn try_from_matrix(q: DenseMatrix) -> Result<Self> {
        if q.cols() > q.rows() {
            return Err(Error::DimensionMismatch(format!("{} columns in dimension {}", q.cols(), q.rows())));
        }
        let defect = q.t_matmul(&q).sub(&DenseMatrix::identity(q.cols())).frobenius_norm();
        if defect > ORTHONORMALITY_TOL {
            return Err(Error::DimensionMismatch(format!("columns are not orthonormal (defect {defect:e})")));
        }
        Ok(Self { q })
    }

    /// Identity columns e_i for i in `idx`.
    pub fn unit_vectors(n: usize, idx: &[usize]) -> Result<Self> {
        let mut q = DenseMatrix::zeros(n, idx.len());
        for (j, &i) in idx.iter().enumerate() {
            if i >= n {
                return Err(Error::DimensionMismatch(format!("unit vector {i} in dimension {n}")));
            }
            q[(i, j)] = 1.0;
        }
        Self::try_from_matrix(q)
    }

    pub fn n(&self) -> usize {
        self.q.rows()
    }

    pub fn r(&self) -> usize {
        self.q.cols()
    }

    pub fn q(&self) -> &DenseMatrix {
        &self.q
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.q
    }

    /// x − q·qᵀ·x
    pub fn project_out(&self, x: &[f64]) -> Vec<f64> {
        let c = self.q.matvec_t(x);
        let mut y = x.to_vec();
        for (j, cj) in c.iter().enumerate() {
            axpy(-cj, self.q.col(j), &mut y);
        }
        y
    }
}

/// Modified Gram–Schmidt with a second full pass. A column is dropped when
/// its norm after both passes falls below `drop_tol` times its original norm.
pub fn orthonormalize(cols: &DenseMatrix, drop_tol: f64) -> Result<OrthonormalBasis> {
    if cols.rows() == 0 {
        return Err(Error::DimensionMismatch("orthonormalize needs at least one row".into()));
    }
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(cols.cols());
    for c in cols.columns() {
        if let Some(v) = orthogonalize_against(&kept, c, drop_tol) {
            kept.push(v);
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyBasis);
    }
    Ok(OrthonormalBasis { q: DenseMatrix::from_columns(cols.rows(), &kept)? })
}

fn orthogonalize_against(basis: &[Vec<f64>], c: &[f64], drop_tol: f64) -> Option<Vec<f64>> {
    let initial = norm2(c);
    if initial == 0.0 {
        return None;
    }
    let mut v = c.to_vec();
    for _pass in 0..2 {
        for q in basis {
            let h = dot(q, &v);
            axpy(-h, q, &mut v);
        }
    }
    let nrm = norm2(&v);
    if nrm < drop_tol * initial || nrm == 0.0 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= nrm);
    Some(v)
}

/// Orthonormal basis of the orthogonal complement, built from the identity
/// columns with the largest remaining weight outside the current span.
pub fn complement(b: &OrthonormalBasis) -> Result<OrthonormalBasis> {
    let (n, r) = (b.n(), b.r());
    if r >= n {
        return Err(Error::FullSpace);
    }
    let mut basis: Vec<Vec<f64>> = b.q.columns().map(<[f64]>::to_vec).collect();
    // weight[i] = squared norm of e_i outside the current span
    let mut weight: Vec<f64> = (0..n).map(|i| 1.0 - basis.iter().map(|q| q[i] * q[i]).sum::<f64>()).collect();
    let mut out = Vec::with_capacity(n - r);
    let mut e = vec![0.0; n];
    while out.len() < n - r {
        let i = (0..n).max_by(|&a, &b| weight[a].total_cmp(&weight[b])).unwrap();
        e[i] = 1.0;
        let v = orthogonalize_against(&basis, &e, 1e-8);
        e[i] = 0.0;
        weight[i] = f64::NEG_INFINITY;
        let Some(v) = v else { continue };
        for (w, x) in weight.iter_mut().zip(&v) {
            *w -= x * x;
        }
        basis.push(v.clone());
        out.push(v);
    }
    Ok(OrthonormalBasis { q: DenseMatrix::from_columns(n, &out)? })
}

/// Extreme principal angle between two equal-dimension subspaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleReport {
    pub sin_theta: f64,
    pub cos_theta: f64,
    /// Subspace distance; equal to `sin_theta`.
    pub dist: f64,
}

impl AngleReport {
    pub fn tan_theta(&self) -> f64 {
        if self.cos_theta == 0.0 {
            f64::INFINITY
        } else {
            self.sin_theta / self.cos_theta
        }
    }
}

/// sin θ = σ_max(zᵀv⊥), cos θ = σ_min(zᵀv).
///
/// σ_max(zᵀv⊥) is evaluated as σ_max((I − vvᵀ)z), which has the same
/// singular values without forming v⊥. Both orientations are evaluated
/// and combined so that `angle(z, v) == angle(v, z)` bit for bit.
pub fn angle(z: &OrthonormalBasis, v: &OrthonormalBasis) -> Result<AngleReport> {
    if z.n() != v.n() || z.r() != v.r() {
        return Err(Error::DimensionMismatch(format!(
            "angle between {}x{} and {}x{} bases",
            z.n(),
            z.r(),
            v.n(),
            v.r()
        )));
    }
    let sin_zv = residual_sigma_max(z, v)?;
    let sin_vz = residual_sigma_max(v, z)?;
    let cos_zv = svd_values(&z.q.t_matmul(&v.q))?.min();
    let cos_vz = svd_values(&v.q.t_matmul(&z.q))?.min();
    let sin_theta = sin_zv.max(sin_vz).clamp(0.0, 1.0);
    let cos_theta = cos_zv.min(cos_vz).clamp(0.0, 1.0);
    Ok(AngleReport { sin_theta, cos_theta, dist: sin_theta })
}

fn residual_sigma_max(z: &OrthonormalBasis, v: &OrthonormalBasis) -> Result<f64> {
    let cols: Vec<Vec<f64>> = z.q.columns().map(|c| v.project_out(c)).collect();
    Ok(svd_values(&DenseMatrix::from_columns(z.n(), &cols)?)?.max())
}

/// max_i ‖A·ṽ_i − λ̃_i·ṽ_i‖₂ over the columns of `vectors`.
pub fn res_max(a_op: &SpectralOperator, values: &[f64], vectors: &DenseMatrix) -> Result<f64> {
    if values.len() != vectors.cols() || vectors.rows() != a_op.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} Ritz values, {}x{} vectors, operator {}",
            values.len(),
            vectors.rows(),
            vectors.cols(),
            a_op.n()
        )));
    }
    let mut worst: f64 = 0.0;
    for (j, &lam) in values.iter().enumerate() {
        let v = vectors.col(j);
        let mut av = a_op.apply(v);
        axpy(-lam, v, &mut av);
        worst = worst.max(norm2(&av));
    }
    Ok(worst)
}

/// Rayleigh–Ritz on span(z) for a symmetric operator: the eigenpairs of
/// zᵀAz lifted back through z. Values ascending.
pub fn rayleigh_ritz_subspace(a_op: &SpectralOperator, z: &OrthonormalBasis) -> Result<(Vec<f64>, DenseMatrix)> {
    if a_op.n() != z.n() {
        return Err(Error::DimensionMismatch(format!("operator {} vs basis {}", a_op.n(), z.n())));
    }
    let az: Vec<Vec<f64>> = z.q.columns().map(|c| a_op.apply(c)).collect();
    let az = DenseMatrix::from_columns(z.n(), &az)?;
    let h = z.q.t_matmul(&az);
    let h = h.add(&h.transpose()).scaled(0.5);
    let eig = eig_symmetric(&h)?;
    Ok((eig.values, z.q.matmul(&eig.vectors)))
}

/// Uniform(−1, 1) entries.
pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DenseMatrix::from_col_major(rows, cols, data).expect("finite by construction")
}

pub fn random_basis<R: Rng>(n: usize, r: usize, rng: &mut R) -> Result<OrthonormalBasis> {
    loop {
        let b = orthonormalize(&random_matrix(n, r, rng), DEFAULT_DROP_TOL)?;
        if b.r() == r {
            return Ok(b);
        }
    }
}

/// A random basis whose largest principal angle to `v` is exactly
/// arcsin(`sin_theta`); the remaining angles are uniform in [0, θ].
///
/// z = v·C·cos Θ + w·sin Θ with C random orthogonal and w a random
/// orthonormal basis inside v⊥. Needs 2r ≤ n.
pub fn basis_at_angle<R: Rng>(v: &OrthonormalBasis, sin_theta: f64, rng: &mut R) -> Result<OrthonormalBasis> {
    let (n, r) = (v.n(), v.r());
    if 2 * r > n || !(0.0..=1.0).contains(&sin_theta) {
        return Err(Error::DimensionMismatch(format!("cannot place {r} directions at sin θ = {sin_theta} in dimension {n}")));
    }
    let theta = sin_theta.asin();
    let angles: Vec<f64> = (0..r).map(|k| if k == 0 { theta } else { rng.gen::<f64>() * theta }).collect();
    let c = random_basis(r, r, rng)?;
    let w = loop {
        let raw = random_matrix(n, r, rng);
        let cols: Vec<Vec<f64>> = raw.columns().map(|x| v.project_out(x)).collect();
        let w = orthonormalize(&DenseMatrix::from_columns(n, &cols)?, DEFAULT_DROP_TOL)?;
        // one more projection pass keeps w ⊥ v at rounding level
        let cols: Vec<Vec<f64>> = w.q.columns().map(|x| v.project_out(x)).collect();
        let w = orthonormalize(&DenseMatrix::from_columns(n, &cols)?, DEFAULT_DROP_TOL)?;
        if w.r() == r {
            break w;
        }
    };
    let vc = v.q.matmul(&c.q);
    let mut z = DenseMatrix::zeros(n, r);
    for k in 0..r {
        let (ck, sk) = (angles[k].cos(), angles[k].sin());
        let col = z.col_mut(k);
        for i in 0..n {
            col[i] = vc[(i, k)] * ck + w.q[(i, k)] * sk;
        }
    }
    orthonormalize(&z, DEFAULT_DROP_TOL)
}
