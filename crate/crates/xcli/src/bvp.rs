use spectral_precond::fmt::sci16;
use spectral_precond::krylov::{gmres, rayleigh_ritz, solve_left, split_coarse_space, ConvergenceHistory};
use spectral_precond::precond::{build_projection, one_level_op, ras_apply, ras_build, CoarseSolve, RhoNorms, Variant};
use spectral_precond::problems::{assemble_bvp, tile_partition, viscosity_csv, ViscosityField};
use spectral_precond::subspace::DEFAULT_DROP_TOL;

use crate::config::{ExperimentConfig, HMode};
use crate::output::{convergence_script, converged_field, count_field, Output};

/// Two-level run on one decomposition.
#[derive(Debug, Clone)]
pub struct TwoLevelRun {
    pub variant: Variant,
    pub mode: HMode,
    pub history: ConvergenceHistory,
}

/// Everything measured on one (field, decomposition) pair.
#[derive(Debug, Clone)]
pub struct BvpCase {
    pub field: ViscosityField,
    pub nparts: usize,
    pub ritz_count: usize,
    /// Columns of the split coarse basis.
    pub coarse_dim: usize,
    pub one_level: ConvergenceHistory,
    pub res_max: f64,
    /// ρ norms of the ILU(0) stand-in for E⁻¹, when that mode ran.
    pub ilu_rho: Option<RhoNorms>,
    pub two_level: Vec<TwoLevelRun>,
}

impl BvpCase {
    pub fn run(&self, variant: Variant, mode: HMode) -> Option<&ConvergenceHistory> {
        self.two_level.iter().find(|r| r.variant == variant && r.mode == mode).map(|r| &r.history)
    }

    fn stem(&self) -> String {
        format!("{}_p{}", self.field.name(), self.nparts)
    }
}

/// One-level RAS solve, Ritz extraction from its Krylov space, split coarse
/// basis, then the two-level methods for each coarse inverse mode.
pub fn bvp_case(
    cfg: &ExperimentConfig,
    field: ViscosityField,
    nparts: usize,
    ritz_count: usize,
) -> anyhow::Result<BvpCase> {
    let (a, b) = assemble_bvp(cfg.grid, &field)?;
    let p = tile_partition(cfg.grid, nparts)?;
    let m = ras_build(&a, &p)?;
    let ahat = one_level_op(&m, &a)?;
    let bhat = ras_apply(&m, &b);
    let one = gmres(&ahat, &bhat, cfg.tol, cfg.max_it)?;
    let mut one_level = one.history;
    one_level.label = "RAS".into();

    let ritz = rayleigh_ritz(&one.arnoldi, ritz_count)?;
    let z = split_coarse_space(&ritz, &p, DEFAULT_DROP_TOL)?;
    let exact = build_projection(&ahat, &z)?;
    let variants = cfg.variants()?;
    let mut ilu_rho = None;
    let mut two_level = Vec::new();
    for mode in cfg.h_modes()? {
        let cs = match mode {
            HMode::Exact => exact.clone(),
            HMode::Ilu => {
                let cs: CoarseSolve = exact.to_ilu()?;
                ilu_rho = Some(cs.rho_norms()?);
                cs
            }
        };
        for &variant in &variants {
            let mut history = solve_left(variant, &ahat, &z, &cs, &bhat, cfg.tol, cfg.max_it)?.history;
            history.label = format!("{}-{}", variant.label(), mode.label());
            two_level.push(TwoLevelRun { variant, mode, history });
        }
    }
    Ok(BvpCase {
        field,
        nparts,
        ritz_count,
        coarse_dim: spectral_precond::precond::CoarseSpace::r(&z),
        one_level,
        res_max: ritz.res_max(),
        ilu_rho,
        two_level,
    })
}

pub fn compute_bvp(cfg: &ExperimentConfig) -> anyhow::Result<Vec<BvpCase>> {
    cfg.validate()?;
    let mut cases = Vec::new();
    for field in cfg.fields()? {
        for (k, &nparts) in cfg.nparts.iter().enumerate() {
            cases.push(bvp_case(cfg, field, nparts, cfg.ritz_for(k))?);
        }
    }
    Ok(cases)
}

pub fn iterations_csv(cases: &[BvpCase]) -> String {
    let mut s = String::from("field,nparts,ritz_count,coarse_dim,method,h_mode,iterations,converged\n");
    for c in cases {
        let head = format!("{},{},{},{}", c.field.name(), c.nparts, c.ritz_count, c.coarse_dim);
        s.push_str(&format!("{head},RAS,none,{},{}\n", count_field(&c.one_level), converged_field(&c.one_level)));
        for r in &c.two_level {
            s.push_str(&format!(
                "{head},{},{},{},{}\n",
                r.variant.label(),
                r.mode.label(),
                count_field(&r.history),
                converged_field(&r.history)
            ));
        }
    }
    s
}

pub fn res_max_csv(cases: &[BvpCase]) -> String {
    let mut s = String::from("field,nparts,ritz_count,res_max\n");
    for c in cases {
        s.push_str(&format!("{},{},{},{}\n", c.field.name(), c.nparts, c.ritz_count, sci16(c.res_max)));
    }
    s
}

pub fn rho_norms_csv(cases: &[BvpCase]) -> String {
    let mut s = String::from("field,nparts,norm_luinv_e_minus_i,norm_e_luinv_minus_i\n");
    for c in cases {
        if let Some(r) = c.ilu_rho {
            s.push_str(&format!("{},{},{},{}\n", c.field.name(), c.nparts, sci16(r.rho2), sci16(r.rho1)));
        }
    }
    s
}

/// Writes one convergence CSV per run and a gnuplot script per
/// decomposition, `bvp_iterations.csv`, `res_max.csv`, `rho_norms.csv`
/// (ILU mode only) and the viscosity fields.
pub fn run_bvp(cfg: &ExperimentConfig) -> anyhow::Result<Output> {
    let cases = compute_bvp(cfg)?;
    let mut out = Output::create(&cfg.output_dir)?;
    for field in cfg.fields()? {
        out.write(&format!("viscosity_{}.csv", field.name()), &viscosity_csv(cfg.grid, &field))?;
    }
    for c in &cases {
        let stem = c.stem();
        let mut series = Vec::new();
        let name = format!("convergence_{stem}_RAS.csv");
        out.write(&name, &c.one_level.to_csv())?;
        series.push((name, "RAS".to_string()));
        for r in &c.two_level {
            let name = format!("convergence_{stem}_{}_{}.csv", r.mode.label(), r.variant.label());
            out.write(&name, &r.history.to_csv())?;
            series.push((name, format!("RAS+{} ({})", r.variant.label(), r.mode.label())));
        }
        let title = format!("{} field, {} subdomains, {} Ritz vectors", c.field.name(), c.nparts, c.ritz_count);
        out.write(&format!("convergence_{stem}.gp"), &convergence_script(&title, &series, &format!("convergence_{stem}.png")))?;
    }
    out.write("bvp_iterations.csv", &iterations_csv(&cases))?;
    out.write("res_max.csv", &res_max_csv(&cases))?;
    if cases.iter().any(|c| c.ilu_rho.is_some()) {
        out.write("rho_norms.csv", &rho_norms_csv(&cases))?;
    }
    out.write("config.json", &cfg.record())?;
    Ok(out)
}
