//! Spectral checks on the diagonal test case shared by `bounds-check` and
//! the acceptance suite.

use rand::Rng;
use spectral_precond::bounds::{
    bound_pa, bound_pd, certify, certify_pc, deflation_adapted_mismatch, inexact_interval, unit_tol, zero_tol,
    BoundIngredients, Interval, SpectrumReport,
};
use spectral_precond::error::Result;
use spectral_precond::matkit::{lu_factor, DenseMatrix};
use spectral_precond::precond::{build_projection, preconditioned_op, CoarseSolve, CoarseSpace, Variant};
use spectral_precond::problems::{perturb_matrix, DiagonalTestCase};
use spectral_precond::spectra::{eig_general, svd_values, Eigenvalue, REALNESS_TOL};
use spectral_precond::subspace::{angle, basis_at_angle, complement, random_basis, OrthonormalBasis};

/// Eigenvalues of P·A from a dense materialization.
pub fn preconditioned_spectrum<Z: CoarseSpace + Clone + 'static>(
    case: &DiagonalTestCase,
    variant: Variant,
    z: &Z,
    cs: &CoarseSolve,
) -> Result<Vec<Eigenvalue>> {
    let op = preconditioned_op(variant, &case.operator(), z, cs)?;
    Ok(eig_general(&op.to_dense()?)?.values)
}

/// The exact-space spectra predicted for each variant: zeros, 1 + Λ or
/// ones on the deflated part, Λ⊥ unchanged.
pub fn predicted_exact_spectrum(case: &DiagonalTestCase, variant: Variant) -> Vec<f64> {
    let mut v: Vec<f64> = case
        .lambda_small()
        .iter()
        .map(|l| match variant {
            Variant::D => 0.0,
            Variant::C => 1.0 + l,
            Variant::A => 1.0,
        })
        .collect();
    v.extend_from_slice(case.lambda_perp());
    v.sort_by(f64::total_cmp);
    v
}

/// Largest deviation of the computed exact-space spectrum from the
/// prediction, relative to max(|λ|, 1) so that the deflated zeros are
/// measured against the unit scale.
pub fn exact_spectrum_error(case: &DiagonalTestCase, variant: Variant) -> Result<(f64, usize)> {
    let cs = build_projection(&case.operator(), &case.exact_basis)?;
    let spec = preconditioned_spectrum(case, variant, &case.exact_basis, &cs)?;
    let complex = spec.iter().filter(|e| !e.is_real(case.norm())).count();
    let mut got: Vec<f64> = spec.iter().map(|e| e.re).collect();
    got.sort_by(f64::total_cmp);
    let want = predicted_exact_spectrum(case, variant);
    let err = got.iter().zip(&want).map(|(g, w)| (g - w).abs() / w.abs().max(1.0)).fold(0.0, f64::max);
    Ok((err, complex))
}

/// Certification of one perturbed-basis draw.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub sin_theta: f64,
    pub ingredients: BoundIngredients,
    /// Reports for P_D, P_C, P_A in that order.
    pub reports: [SpectrumReport; 3],
    /// Smallest real part in the spectrum of P_C·A.
    pub pc_min_real: f64,
    /// Largest imaginary part over the three spectra.
    pub max_imag: f64,
    /// Sorted nonzero P_D·A spectrum against sorted non-unit P_A·A spectrum.
    pub cor_mismatch: f64,
}

impl TrialOutcome {
    pub fn violations(&self) -> usize {
        self.reports.iter().map(|r| r.violations.len()).sum()
    }
}

/// Draws Z at the given largest principal angle to the exact basis and
/// certifies all three preconditioned spectra against their bounds with
/// tolerance 1e-8·‖A‖₂.
pub fn containment_trial<R: Rng>(case: &DiagonalTestCase, sin_theta: f64, rng: &mut R) -> Result<TrialOutcome> {
    let a = case.operator();
    let z = basis_at_angle(&case.exact_basis, sin_theta, rng)?;
    let cs = build_projection(&a, &z)?;
    let ang = angle(&z, &case.exact_basis)?;
    let ing = BoundIngredients::new(case.lambda_small(), case.lambda_perp(), &ang, &cs)?;
    let norm_a = case.norm();
    let (zt, ut, cert) = (zero_tol(norm_a), unit_tol(norm_a), 1e-8 * norm_a);

    let pd = preconditioned_spectrum(case, Variant::D, &z, &cs)?;
    let pc = preconditioned_spectrum(case, Variant::C, &z, &cs)?;
    let pa = preconditioned_spectrum(case, Variant::A, &z, &cs)?;
    let reports = [
        certify(&pd, bound_pd(&ing)?, zt, ut, cert),
        certify_pc(&pc, &ing, zt, ut, cert)?,
        certify(&pa, bound_pa(&ing)?, zt, ut, cert),
    ];
    let max_imag = pd.iter().chain(&pc).chain(&pa).fold(0.0_f64, |m, e| m.max(e.im.abs()));
    let pc_min_real = pc.iter().fold(f64::INFINITY, |m, e| m.min(e.re));
    let re = |s: &[Eigenvalue]| s.iter().map(|e| e.re).collect::<Vec<_>>();
    let cor_mismatch = deflation_adapted_mismatch(&re(&pd), &re(&pa), z.r())?;
    Ok(TrialOutcome { sin_theta: ang.sin_theta, ingredients: ing, reports, pc_min_real, max_imag, cor_mismatch })
}

/// Exact basis, E⁻¹ replaced by the inverse of H̃ = Ẽ + rand/ε_h.
#[derive(Debug, Clone)]
pub struct InexactOutcome {
    pub eps_h: f64,
    pub ingredients: BoundIngredients,
    /// (interval, report over the real-classified eigenvalues, number of
    /// complex eigenvalues left out) for P_D, P_C, P_A.
    pub results: Vec<(Variant, Interval, SpectrumReport, usize)>,
    /// Real parts of the P̄_D·A spectrum, ascending.
    pub pd_real: Vec<f64>,
}

impl InexactOutcome {
    pub fn violations(&self) -> usize {
        self.results.iter().map(|r| r.2.violations.len()).sum()
    }

    pub fn interval(&self, v: Variant) -> Interval {
        self.results.iter().find(|r| r.0 == v).expect("all variants computed").1
    }
}

pub fn inexact_check(case: &DiagonalTestCase, eps_h: f64, seed: u64) -> Result<InexactOutcome> {
    let a = case.operator();
    let v = &case.exact_basis;
    let exact = build_projection(&a, v)?;
    let e = exact.e().clone();
    let h = perturb_matrix(&e, eps_h, seed);
    let h_inv = lu_factor(&h)?.inverse();
    let cs = CoarseSolve::explicit(e, h_inv)?;
    let rho = cs.rho_norms()?;
    let ang = angle(v, v)?;
    let ing = BoundIngredients::new(case.lambda_small(), case.lambda_perp(), &ang, &exact)?.with_rho(rho.rho1, rho.rho2);
    let norm_a = case.norm();
    let (zt, ut, cert) = (zero_tol(norm_a), unit_tol(norm_a), 1e-8 * norm_a);
    let mut results = Vec::new();
    let mut pd_real = Vec::new();
    for variant in Variant::ALL {
        let spec = preconditioned_spectrum(case, variant, v, &cs)?;
        let (real, complex): (Vec<Eigenvalue>, Vec<Eigenvalue>) =
            spec.iter().partition(|e| e.im.abs() <= REALNESS_TOL * norm_a);
        let interval = inexact_interval(&ing, variant);
        let report = certify(&real, interval, zt, ut, cert);
        if variant == Variant::D {
            pd_real = spec.iter().map(|e| e.re).collect();
            pd_real.sort_by(f64::total_cmp);
        }
        results.push((variant, interval, report, complex.len()));
    }
    Ok(InexactOutcome { eps_h, ingredients: ing, results, pd_real })
}

/// The two angle identities on one random pair of r-dimensional subspaces
/// of ℝⁿ: |σ_max(Zᵀ·V⊥) − σ_max(Vᵀ·Z⊥)| and |σ_min(Zᵀ·V) − σ_min(Z⊥ᵀ·V⊥)|.
pub fn angle_identity_gaps<R: Rng>(n: usize, r: usize, rng: &mut R) -> Result<(f64, f64)> {
    let z = random_basis(n, r, rng)?;
    let v = random_basis(n, r, rng)?;
    let (zp, vp) = (complement(&z)?, complement(&v)?);
    let smax = |a: &OrthonormalBasis, b: &OrthonormalBasis| -> Result<f64> { Ok(svd_values(&cross(a, b))?.max()) };
    let smin = |a: &OrthonormalBasis, b: &OrthonormalBasis| -> Result<f64> { Ok(svd_values(&cross(a, b))?.min()) };
    let sym = (smax(&z, &vp)? - smax(&v, &zp)?).abs();
    let comp = (smin(&z, &v)? - smin(&zp, &vp)?).abs();
    Ok((sym, comp))
}

fn cross(a: &OrthonormalBasis, b: &OrthonormalBasis) -> DenseMatrix {
    a.q().t_matmul(b.q())
}
