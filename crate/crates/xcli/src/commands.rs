use std::path::Path;

use anyhow::{bail, Context};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_precond::bounds::{
    bound_pa, bound_pd, certify, certify_pc, inexact_interval, unit_tol, zero_tol, BoundIngredients, SpectrumReport,
};
use spectral_precond::error::Error;
use spectral_precond::fmt::sci16;
use spectral_precond::matkit::{mm, DenseMatrix};
use spectral_precond::precond::{build_projection, preconditioned_op, SpectralOperator, Variant, MATERIALIZE_LIMIT};
use spectral_precond::problems::{assemble_bvp, diag_case, perturb_basis, viscosity_csv, Scale, ViscosityField};
use spectral_precond::spectra::{eig_general, eig_symmetric, Eigenvalue, REALNESS_TOL};
use spectral_precond::subspace::{angle, orthonormalize, OrthonormalBasis, DEFAULT_DROP_TOL};

use crate::checks::containment_trial;
use crate::config::{ExperimentConfig, HMode};
use crate::output::Output;

/// Result of `spectrum`: the certified report and how many eigenvalues were
/// left out of an inexact-mode check for being complex.
#[derive(Debug, Clone)]
pub struct SpectrumOutcome {
    pub report: SpectrumReport,
    pub complex_skipped: usize,
    pub ingredients: BoundIngredients,
}

/// sinθ(Z, V) below which Z counts as spanning V.
pub const EXACT_SPACE_TOL: f64 = 1e-8;

/// Materializes P·A for a symmetric A and a coarse basis read from Matrix
/// Market files, computes its spectrum and certifies it against the bound
/// of `variant`. The exact eigenvectors of the r smallest eigenvalues of A
/// play the role of V. The inexact-projection intervals used in ILU mode
/// assume Z spans V, so a basis further than [`EXACT_SPACE_TOL`] from it is
/// rejected there.
pub fn cmd_spectrum(
    matrix: &Path,
    basis: &Path,
    variant: Variant,
    mode: HMode,
    out: &mut Output,
) -> anyhow::Result<SpectrumOutcome> {
    let a = mm::read_path(matrix).with_context(|| format!("reading {}", matrix.display()))?.to_dense();
    if a.rows() > MATERIALIZE_LIMIT {
        return Err(Error::TooLargeToMaterialize { n: a.rows(), limit: MATERIALIZE_LIMIT }.into());
    }
    let zraw = mm::read_path(basis).with_context(|| format!("reading {}", basis.display()))?.to_dense();
    if zraw.rows() != a.rows() {
        bail!("basis has {} rows for a matrix of order {}", zraw.rows(), a.rows());
    }
    let z = orthonormalize(&zraw, DEFAULT_DROP_TOL)?;
    let r = z.r();
    let eig = eig_symmetric(&a)?;
    let mut order: Vec<usize> = (0..a.rows()).collect();
    order.sort_by(|&i, &j| eig.values[i].total_cmp(&eig.values[j]));
    if r >= a.rows() {
        bail!("basis of rank {r} leaves no complement in dimension {}", a.rows());
    }
    let v = OrthonormalBasis::try_from_matrix(eig.vectors.select_columns(&order[..r]))?;
    let small: Vec<f64> = order[..r].iter().map(|&i| eig.values[i]).collect();
    let perp: Vec<f64> = order[r..].iter().map(|&i| eig.values[i]).collect();
    let norm_a = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));

    let a_op = SpectralOperator::from_dense(a)?;
    let exact = build_projection(&a_op, &z)?;
    let ang = angle(&z, &v)?;
    let ing = BoundIngredients::new(&small, &perp, &ang, &exact)?;
    if mode == HMode::Ilu && ang.sin_theta > EXACT_SPACE_TOL {
        bail!("ilu mode needs a basis of the exact invariant subspace (sin theta = {:e})", ang.sin_theta);
    }
    let cs = match mode {
        HMode::Exact => exact,
        HMode::Ilu => exact.to_ilu()?,
    };
    let spec = eig_general(&preconditioned_op(variant, &a_op, &z, &cs)?.to_dense()?)?.values;
    let (zt, ut, cert) = (zero_tol(norm_a), unit_tol(norm_a), 1e-8 * norm_a);
    let (report, complex_skipped, ingredients) = match mode {
        HMode::Exact => {
            let report = match variant {
                Variant::D => certify(&spec, bound_pd(&ing)?, zt, ut, cert),
                Variant::C => certify_pc(&spec, &ing, zt, ut, cert)?,
                Variant::A => certify(&spec, bound_pa(&ing)?, zt, ut, cert),
            };
            (report, 0, ing)
        }
        HMode::Ilu => {
            let rho = cs.rho_norms()?;
            let ing = ing.with_rho(rho.rho1, rho.rho2);
            let (real, complex): (Vec<Eigenvalue>, Vec<Eigenvalue>) =
                spec.iter().partition(|e| e.im.abs() <= REALNESS_TOL * norm_a);
            (certify(&real, inexact_interval(&ing, variant), zt, ut, cert), complex.len(), ing)
        }
    };
    out.write(&format!("spectrum_report_{}.csv", variant.label()), &report.to_csv())?;
    Ok(SpectrumOutcome { report, complex_skipped, ingredients })
}

/// Summary of `bounds-check`.
#[derive(Debug, Clone, Default)]
pub struct BoundsSummary {
    pub trials: usize,
    pub violations: usize,
    pub flagged: usize,
    pub pc_nonpositive: usize,
    pub max_cor_mismatch: f64,
}

/// Random perturbed-basis trials on the diagonal case: each draw is
/// certified against the P_D, P_C and P_A bounds.
pub fn cmd_bounds_check(cfg: &ExperimentConfig, out: &mut Output) -> anyhow::Result<BoundsSummary> {
    cfg.validate()?;
    let case = diag_case(cfg.scale()?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = String::from("trial,sin_theta,variant,certified,max_violation,flagged,min_real\n");
    let mut summary = BoundsSummary::default();
    for &s in &cfg.sin_thetas {
        for t in 0..cfg.trials {
            let o = containment_trial(&case, s, &mut rng)?;
            summary.trials += 1;
            summary.violations += o.violations();
            summary.max_cor_mismatch = summary.max_cor_mismatch.max(o.cor_mismatch);
            if o.pc_min_real <= 0.0 {
                summary.pc_nonpositive += 1;
            }
            for (variant, rep) in Variant::ALL.iter().zip(&o.reports) {
                summary.flagged += rep.flagged.len();
                let min_real = rep.eigenvalues.iter().fold(f64::INFINITY, |m, e| m.min(e.re));
                csv.push_str(&format!(
                    "{t},{},{},{},{},{},{}\n",
                    sci16(o.sin_theta),
                    variant.label(),
                    rep.is_certified(),
                    sci16(rep.max_violation()),
                    rep.flagged.len(),
                    sci16(min_real)
                ));
            }
        }
    }
    out.write("bounds_check.csv", &csv)?;
    Ok(summary)
}

fn write_mm(out: &mut Output, name: &str, f: impl FnOnce(&mut Vec<u8>) -> spectral_precond::error::Result<()>) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    out.write(name, std::str::from_utf8(&buf).expect("Matrix Market output is ASCII"))?;
    Ok(())
}

/// Diagonal case: `matrix.mtx`, `rhs.mtx`, `basis_exact.mtx` and, with
/// `eps`, `basis_perturbed.mtx` holding V + rand/ε orthonormalized.
pub fn gen_diag(scale: Scale, eps: Option<f64>, seed: u64, out: &mut Output) -> anyhow::Result<()> {
    let case = diag_case(scale)?;
    let a = spectral_precond::matkit::CsrMatrix::from_dense(&case.matrix(), 0.0);
    write_mm(out, "matrix.mtx", |w| mm::write_coordinate(w, &a, mm::Symmetry::Symmetric))?;
    write_mm(out, "rhs.mtx", |w| mm::write_array(w, &column(&case.rhs)))?;
    write_mm(out, "basis_exact.mtx", |w| mm::write_array(w, case.exact_basis.q()))?;
    if let Some(eps) = eps {
        let (z, _) = perturb_basis(&case.exact_basis, eps, seed)?;
        write_mm(out, "basis_perturbed.mtx", |w| mm::write_array(w, z.q()))?;
    }
    Ok(())
}

/// Diffusion problem: `matrix.mtx`, `rhs.mtx` and `viscosity.csv`.
pub fn gen_bvp(field: ViscosityField, grid: usize, out: &mut Output) -> anyhow::Result<()> {
    let (a, b) = assemble_bvp(grid, &field)?;
    write_mm(out, "matrix.mtx", |w| mm::write_coordinate(w, &a, mm::Symmetry::Symmetric))?;
    write_mm(out, "rhs.mtx", |w| mm::write_array(w, &column(&b)))?;
    out.write("viscosity.csv", &viscosity_csv(grid, &field))?;
    Ok(())
}

fn column(v: &[f64]) -> DenseMatrix {
    DenseMatrix::from_columns(v.len(), &[v.to_vec()]).expect("single column")
}
