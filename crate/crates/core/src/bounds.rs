//! Eigenvalue intervals of the perturbation theorems and certification of
//! computed spectra against them.

use crate::error::{Error, Result};
use crate::fmt::sci16;
use crate::precond::{CoarseSolve, Variant};
use crate::spectra::{Eigenvalue, REALNESS_TOL};
use crate::subspace::AngleReport;

/// Every closed-form quantity the bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundIngredients {
    pub lambda_min_perp: f64,
    pub lambda_max_perp: f64,
    pub lambda_min_small: f64,
    pub lambda_max_small: f64,
    pub sin_theta: f64,
    pub cos_theta: f64,
    /// sin/cos, infinite when cos θ = 0.
    pub tan_theta: f64,
    pub norm_e: f64,
    pub norm_einv: f64,
    pub norm_rho1: f64,
    pub norm_rho2: f64,
}

impl BoundIngredients {
    /// Eigenvalue extremes from the exact spectral split of A, angles from
    /// `angle`, and ‖E‖₂, ‖E⁻¹‖₂ from the coarse solve. ρ norms start at 0.
    pub fn new(lambda_small: &[f64], lambda_perp: &[f64], angle: &AngleReport, cs: &CoarseSolve) -> Result<Self> {
        let (norm_e, norm_einv) = cs.e_norms()?;
        Self::from_parts(lambda_small, lambda_perp, angle, norm_e, norm_einv)
    }

    pub fn from_parts(lambda_small: &[f64], lambda_perp: &[f64], angle: &AngleReport, norm_e: f64, norm_einv: f64) -> Result<Self> {
        if lambda_small.is_empty() || lambda_perp.is_empty() {
            return Err(Error::DimensionMismatch("both spectral blocks must be nonempty".into()));
        }
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            lambda_min_perp: min(lambda_perp),
            lambda_max_perp: max(lambda_perp),
            lambda_min_small: min(lambda_small),
            lambda_max_small: max(lambda_small),
            sin_theta: angle.sin_theta,
            cos_theta: angle.cos_theta,
            tan_theta: angle.tan_theta(),
            norm_e,
            norm_einv,
            norm_rho1: 0.0,
            norm_rho2: 0.0,
        })
    }

    pub fn with_rho(mut self, rho1: f64, rho2: f64) -> Self {
        self.norm_rho1 = rho1;
        self.norm_rho2 = rho2;
        self
    }

    /// ‖Λ‖₂ of the SPD block Λ.
    pub fn norm_lambda(&self) -> f64 {
        self.lambda_max_small.abs().max(self.lambda_min_small.abs())
    }

    fn check_angle(&self) -> Result<()> {
        if !(self.cos_theta > 0.0) {
            return Err(Error::AngleDegenerate);
        }
        Ok(())
    }

    /// η_D = λ_max(Λ⊥)(sin θ + sin²θ)
    pub fn eta_d(&self) -> f64 {
        let s = self.sin_theta;
        self.lambda_max_perp * (s + s * s)
    }

    /// ε_D = η_D + ‖E⁻¹‖(‖E‖ + λ_max(Λ⊥))² tan²θ
    pub fn eps_d(&self) -> f64 {
        self.eta_d() + self.norm_einv * (self.norm_e + self.lambda_max_perp).powi(2) * self.tan_theta.powi(2)
    }

    /// ε_C = ½(λ_max(Λ⊥)‖E⁻¹‖ + 1) tan θ + sin θ + sin²θ
    pub fn eps_c(&self) -> f64 {
        self.eps_c_with_factor(0.5)
    }

    fn eps_c_with_factor(&self, f: f64) -> f64 {
        let s = self.sin_theta;
        f * (self.lambda_max_perp * self.norm_einv + 1.0) * self.tan_theta + s + s * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Distance of x outside the interval, 0 inside.
    pub fn distance(&self, x: f64) -> f64 {
        (self.lo - x).max(x - self.hi).max(0.0)
    }
}

/// Nonzero eigenvalues of P_D·A.
pub fn bound_pd(ing: &BoundIngredients) -> Result<Interval> {
    ing.check_angle()?;
    Ok(Interval::new(ing.lambda_min_perp - ing.eps_d(), ing.lambda_max_perp + ing.eta_d()))
}

/// All eigenvalues of P_A·A.
pub fn bound_pa(ing: &BoundIngredients) -> Result<Interval> {
    let d = bound_pd(ing)?;
    Ok(Interval::new(d.lo.min(1.0), d.hi.max(1.0)))
}

fn pc_extremes(ing: &BoundIngredients) -> Interval {
    Interval::new(
        (1.0 + ing.lambda_min_small).min(ing.lambda_min_perp),
        (1.0 + ing.lambda_max_small).max(ing.lambda_max_perp),
    )
}

/// All eigenvalues (real parts) of P_C·A, with ε_C exactly as printed.
pub fn bound_pc(ing: &BoundIngredients) -> Result<Interval> {
    ing.check_angle()?;
    let base = pc_extremes(ing);
    let e = ing.eps_c();
    Ok(Interval::new(base.lo - e, base.hi + e))
}

/// The P_C interval with the ½ on the tan θ term replaced by 1.
pub fn bound_pc_unhalved(ing: &BoundIngredients) -> Result<Interval> {
    ing.check_angle()?;
    let base = pc_extremes(ing);
    let e = ing.eps_c_with_factor(1.0);
    Ok(Interval::new(base.lo - e, base.hi + e))
}

/// Interval for the preconditioners built with H̃⁻¹ in place of Ẽ⁻¹.
/// Applies only when every eigenvalue in `spectrum` is real to within
/// 1e-8·`norm_a`.
pub fn bound_inexact(ing: &BoundIngredients, variant: Variant, spectrum: &[Eigenvalue], norm_a: f64) -> Result<Interval> {
    let complex = spectrum.iter().filter(|v| v.im.abs() > REALNESS_TOL * norm_a).count();
    if complex > 0 {
        return Err(Error::NotApplicable(complex));
    }
    Ok(inexact_interval(ing, variant))
}

/// The ξ-interval without the realness precondition.
pub fn inexact_interval(ing: &BoundIngredients, variant: Variant) -> Interval {
    match variant {
        Variant::D => {
            let xi = ing.norm_rho1 * ing.norm_lambda();
            Interval::new(-xi, ing.lambda_max_perp + xi)
        }
        Variant::C => {
            let xi = ing.norm_rho2;
            let base = pc_extremes(ing);
            Interval::new(base.lo - xi, base.hi + xi)
        }
        Variant::A => {
            let xi = ing.norm_rho1 * ing.norm_lambda() + ing.norm_rho2;
            Interval::new(1f64.min(ing.lambda_min_perp) - xi, 1f64.max(ing.lambda_max_perp) + xi)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenClass {
    Zero,
    Unit,
    Other,
}

impl EigenClass {
    pub fn label(self) -> &'static str {
        match self {
            EigenClass::Zero => "zero",
            EigenClass::Unit => "unit",
            EigenClass::Other => "other",
        }
    }
}

/// A spectrum classified against an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Eigenvalue>,
    pub classes: Vec<EigenClass>,
    pub zero_class: Vec<usize>,
    pub unit_class: Vec<usize>,
    pub interval: Interval,
    /// (index, distance outside the interval) beyond the certification tolerance.
    pub violations: Vec<(usize, f64)>,
    /// Excursions that are only explained by the ½ factor of ε_C.
    pub flagged: Vec<(usize, f64)>,
}

impl SpectrumReport {
    pub fn is_certified(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_violation(&self) -> f64 {
        self.violations.iter().fold(0.0, |m, v| m.max(v.1))
    }

    /// `re,im,class,violation_distance`
    pub fn to_csv(&self) -> String {
        let mut dist = vec![0.0; self.eigenvalues.len()];
        for &(i, d) in self.violations.iter().chain(&self.flagged) {
            dist[i] = d;
        }
        let mut s = String::from("re,im,class,violation_distance\n");
        for (k, v) in self.eigenvalues.iter().enumerate() {
            let class = if self.flagged.iter().any(|f| f.0 == k) { "flagged" } else { self.classes[k].label() };
            s.push_str(&format!("{},{},{},{}\n", sci16(v.re), sci16(v.im), class, sci16(dist[k])));
        }
        s
    }
}

/// Classifies eigenvalues as zero (|λ| ≤ zero_tol, excluded from the
/// check), unit (|λ − 1| ≤ unit_tol) or other, and records every
/// non-excluded eigenvalue whose real part lies more than `cert_tol`
/// outside `interval`.
pub fn certify(spectrum: &[Eigenvalue], interval: Interval, zero_tol: f64, unit_tol: f64, cert_tol: f64) -> SpectrumReport {
    let mut classes = Vec::with_capacity(spectrum.len());
    let (mut zero_class, mut unit_class, mut violations) = (Vec::new(), Vec::new(), Vec::new());
    for (k, v) in spectrum.iter().enumerate() {
        let class = if v.abs() <= zero_tol {
            zero_class.push(k);
            EigenClass::Zero
        } else if (Eigenvalue { re: v.re - 1.0, im: v.im }).abs() <= unit_tol {
            unit_class.push(k);
            EigenClass::Unit
        } else {
            EigenClass::Other
        };
        classes.push(class);
        if class != EigenClass::Zero {
            let d = interval.distance(v.re);
            if d > cert_tol {
                violations.push((k, d));
            }
        }
    }
    SpectrumReport { eigenvalues: spectrum.to_vec(), classes, zero_class, unit_class, interval, violations, flagged: Vec::new() }
}

/// [`certify`] against the printed P_C interval, moving violations that
/// fall inside the unhalved interval into `flagged`.
pub fn certify_pc(spectrum: &[Eigenvalue], ing: &BoundIngredients, zero_tol: f64, unit_tol: f64, cert_tol: f64) -> Result<SpectrumReport> {
    let printed = bound_pc(ing)?;
    let wide = bound_pc_unhalved(ing)?;
    let mut report = certify(spectrum, printed, zero_tol, unit_tol, cert_tol);
    let (flagged, real): (Vec<_>, Vec<_>) =
        report.violations.iter().partition(|&&(k, _)| wide.distance(spectrum[k].re) <= cert_tol);
    report.flagged = flagged;
    report.violations = real;
    Ok(report)
}

/// Largest mismatch between the sorted nonzero spectrum of P_D·A and the
/// sorted non-unit spectrum of P_A·A, given `r` deflated directions:
/// the r smallest-magnitude values of `pd` are dropped and r ones are
/// added, then both lists are compared entrywise.
pub fn deflation_adapted_mismatch(pd: &[f64], pa: &[f64], r: usize) -> Result<f64> {
    if pd.len() != pa.len() || r > pd.len() {
        return Err(Error::DimensionMismatch(format!("spectra of length {} and {} with r = {r}", pd.len(), pa.len())));
    }
    let mut by_mag: Vec<f64> = pd.to_vec();
    by_mag.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut expect: Vec<f64> = by_mag[r..].to_vec();
    expect.extend(std::iter::repeat(1.0).take(r));
    expect.sort_by(f64::total_cmp);
    let mut got = pa.to_vec();
    got.sort_by(f64::total_cmp);
    Ok(expect.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// zero_tol = 1e-8·‖A‖₂
pub fn zero_tol(norm_a: f64) -> f64 {
    1e-8 * norm_a
}

/// unit_tol = 1e-8·(1 + ‖A‖₂)
pub fn unit_tol(norm_a: f64) -> f64 {
    1e-8 * (1.0 + norm_a)
}
