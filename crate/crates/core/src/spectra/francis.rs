//! Eigenvalues of general real matrices: diagonal balancing, Householder
//! reduction to upper Hessenberg form, then implicit Francis double-shift QR.

use crate::error::{Error, Result};
use crate::matkit::DenseMatrix;

use super::Eigenvalue;

/// Eigenvalues (unordered) of a general real square matrix.
#[derive(Debug, Clone)]
pub struct GeneralEigen {
    pub values: Vec<Eigenvalue>,
}

impl GeneralEigen {
    /// Number of eigenvalues whose imaginary part exceeds `tol`.
    pub fn count_complex(&self, tol: f64) -> usize {
        self.values.iter().filter(|v| v.im.abs() > tol).count()
    }

    /// Real parts sorted ascending.
    pub fn sorted_real_parts(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.values.iter().map(|v| v.re).collect();
        r.sort_by(f64::total_cmp);
        r
    }
}

pub fn eig_general(a: &DenseMatrix) -> Result<GeneralEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("eig_general of {}x{}", a.rows(), a.cols())));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let values = hessenberg_qr(&mut h)?;
    Ok(GeneralEigen { values })
}

/// Eigenvalues of a matrix already in upper Hessenberg form (entries below
/// the first subdiagonal are ignored).
pub fn eig_hessenberg(h: &DenseMatrix) -> Result<GeneralEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("eig_hessenberg needs a square matrix".into()));
    }
    let mut h = h.clone();
    for j in 0..h.cols() {
        for i in j + 2..h.rows() {
            h[(i, j)] = 0.0;
        }
    }
    balance(&mut h);
    let values = hessenberg_qr(&mut h)?;
    Ok(GeneralEigen { values })
}

/// Power-of-two diagonal similarity scaling that equalizes row and
/// column norms. Preserves Hessenberg structure.
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut DenseMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let alpha: f64 = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let beta = if x0 >= 0.0 { -alpha } else { alpha };
        // v = x − beta·e1, normalized so H = I − 2vvᵀ/(vᵀv)
        v[k + 1] = x0 - beta;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vnorm2: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        // left: A[k+1.., k..] -= tau v (vᵀ A)
        for j in k..n {
            let col = a.col_mut(j);
            let s: f64 = (k + 1..n).map(|i| v[i] * col[i]).sum::<f64>() * tau;
            for i in k + 1..n {
                col[i] -= s * v[i];
            }
        }
        // right: A[.., k+1..] -= tau (A v) vᵀ
        let mut w = vec![0.0; n];
        for j in k + 1..n {
            let vj = v[j];
            for (wi, &aij) in w.iter_mut().zip(a.col(j)) {
                *wi += aij * vj;
            }
        }
        for j in k + 1..n {
            let f = tau * v[j];
            let col = a.col_mut(j);
            for i in 0..n {
                col[i] -= f * w[i];
            }
        }
        a[(k + 1, k)] = beta;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (eigenvalues only).
fn hessenberg_qr(a: &mut DenseMatrix) -> Result<Vec<Eigenvalue>> {
    let n = a.rows();
    let mut out = vec![Eigenvalue::default(); n];
    if n == 0 {
        return Ok(out);
    }
    let eps = f64::EPSILON;
    let max_total = 40 * n;
    let mut total = 0usize;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut t = 0.0;
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                out[nu] = Eigenvalue::real(x + t);
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    out[nu - 1] = Eigenvalue::real(x + z);
                    out[nu] = Eigenvalue::real(if z != 0.0 { x - w / z } else { x + z });
                } else {
                    out[nu] = Eigenvalue { re: x + p, im: -z };
                    out[nu - 1] = Eigenvalue { re: x + p, im: z };
                }
                nn -= 2;
                break;
            }
            total += 1;
            if total > max_total {
                return Err(Error::NoConvergence { method: "Francis QR", iterations: total - 1 });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let (mut p, mut q, mut r);
            let mut m = nu - 2;
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[(i + 2, i)] = 0.0;
                if i != m {
                    a[(i + 2, i - 1)] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                let mut xk = 0.0;
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k + 1 != nu { a[(k + 2, k - 1)] } else { 0.0 };
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != 0.0 {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * xk;
                    }
                    p += s;
                    let xx = p / s;
                    let yy = q / s;
                    let zz = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * zz;
                        }
                        a[(k + 1, j)] -= pp * yy;
                        a[(k, j)] -= pp * xx;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = xx * a[(i, k)] + yy * a[(i, k + 1)];
                        if k + 1 != nu {
                            pp += zz * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(out)
}
