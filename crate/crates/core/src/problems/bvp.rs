use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fmt::sci16;
use crate::matkit::CsrMatrix;

/// Interior nodes per direction of the unit-square grid.
pub const GRID: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViscosityField {
    /// κ = 10⁴(⌊9y⌋ + 1) where ⌊9x⌋ and ⌊9y⌋ are both even, else 1.
    Skyscraper,
    /// κ = max(1, |10⁶/3·sin(4π(x + y) + 0.1)|).
    Continuous,
    Constant(f64),
}

impl ViscosityField {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            ViscosityField::Skyscraper => {
                let (ix, iy) = ((9.0 * x).floor() as i64, (9.0 * y).floor() as i64);
                if ix % 2 == 0 && iy % 2 == 0 {
                    1e4 * (iy as f64 + 1.0)
                } else {
                    1.0
                }
            }
            ViscosityField::Continuous => (1e6 / 3.0 * (4.0 * PI * (x + y) + 0.1).sin()).abs().max(1.0),
            ViscosityField::Constant(c) => c,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ViscosityField::Skyscraper => "skyscraper",
            ViscosityField::Continuous => "continuous",
            ViscosityField::Constant(_) => "constant",
        }
    }
}

impl std::str::FromStr for ViscosityField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skyscraper" => Ok(ViscosityField::Skyscraper),
            "continuous" => Ok(ViscosityField::Continuous),
            _ => match s.strip_prefix("constant:").map(str::parse) {
                Some(Ok(c)) => Ok(ViscosityField::Constant(c)),
                _ => Err(Error::Parse(format!("unknown viscosity field `{s}`"))),
            },
        }
    }
}

fn kappa(field: &ViscosityField, x: f64, y: f64) -> Result<f64> {
    let k = field.eval(x, y);
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::NonPositiveViscosity { x, y, value: k });
    }
    Ok(k)
}

/// −∇·(κ∇u) = 1 on the unit square with u = 0 on the boundary: 5-point
/// finite differences on `grid`×`grid` interior nodes (h = 1/(grid+1)),
/// harmonic mean of nodal κ on each edge, boundary values eliminated.
/// Node (i, j) at (x, y) = ((i+1)h, (j+1)h) has index j·grid + i.
pub fn assemble_bvp(grid: usize, field: &ViscosityField) -> Result<(CsrMatrix, Vec<f64>)> {
    if grid == 0 {
        return Err(Error::DimensionMismatch("empty grid".into()));
    }
    let h = 1.0 / (grid + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let n = grid * grid;
    let mut t = Vec::with_capacity(5 * n);
    for j in 0..grid {
        for i in 0..grid {
            let (x, y) = ((i + 1) as f64 * h, (j + 1) as f64 * h);
            let kp = kappa(field, x, y)?;
            let row = j * grid + i;
            let mut diag = 0.0;
            let neighbors = [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)];
            for (di, dj) in neighbors {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                let (nx, ny) = ((ni + 1) as f64 * h, (nj + 1) as f64 * h);
                let kq = kappa(field, nx, ny)?;
                let w = 2.0 * kp * kq / (kp + kq) * inv_h2;
                diag += w;
                if ni >= 0 && nj >= 0 && (ni as usize) < grid && (nj as usize) < grid {
                    t.push((row, nj as usize * grid + ni as usize, -w));
                }
            }
            t.push((row, row, diag));
        }
    }
    Ok((CsrMatrix::from_triplets(n, n, &t)?, vec![1.0; n]))
}

/// `x,y,kappa` rows over the interior nodes.
pub fn viscosity_csv(grid: usize, field: &ViscosityField) -> String {
    let h = 1.0 / (grid + 1) as f64;
    let mut s = String::from("x,y,kappa\n");
    for j in 0..grid {
        for i in 0..grid {
            let (x, y) = ((i + 1) as f64 * h, (j + 1) as f64 * h);
            s.push_str(&format!("{},{},{}\n", sci16(x), sci16(y), sci16(field.eval(x, y))));
        }
    }
    s
}
