use rayon::prelude::*;
use spectral_precond::fmt::sci16;
use spectral_precond::krylov::{gmres, solve_left, ConvergenceHistory};
use spectral_precond::matkit::lu_factor;
use spectral_precond::precond::{build_projection, CoarseSolve, RhoNorms, Variant};
use spectral_precond::problems::{diag_case, perturb_basis, perturb_matrix, DiagonalTestCase};
use spectral_precond::spectra::Eigenvalue;
use spectral_precond::subspace::{rayleigh_ritz_subspace, res_max};

use crate::checks::preconditioned_spectrum;
use crate::config::ExperimentConfig;
use crate::output::{converged_field, count_field, spectrum_script, Output};

#[derive(Debug, Clone)]
pub struct Table1Row {
    pub eps: f64,
    pub sin_theta: f64,
    pub res_max: f64,
}

/// One GMRES run of the perturbed-basis study; `eps` is infinite for the
/// exact basis.
#[derive(Debug, Clone)]
pub struct Table2Row {
    pub variant: Variant,
    pub eps: f64,
    pub history: ConvergenceHistory,
}

#[derive(Debug, Clone)]
pub struct Table3Row {
    pub variant: Variant,
    pub eps_h: f64,
    pub rho: RhoNorms,
    pub history: ConvergenceHistory,
}

#[derive(Debug, Clone)]
pub struct DiagTables {
    pub unpreconditioned: ConvergenceHistory,
    pub table1: Vec<Table1Row>,
    pub table2: Vec<Table2Row>,
    pub table3: Vec<Table3Row>,
}

impl DiagTables {
    pub fn count(&self, variant: Variant, eps: f64) -> Option<&ConvergenceHistory> {
        self.table2.iter().find(|r| r.variant == variant && r.eps == eps).map(|r| &r.history)
    }

    pub fn exact(&self, variant: Variant) -> Option<&ConvergenceHistory> {
        self.count(variant, f64::INFINITY)
    }

    pub fn inexact(&self, variant: Variant, eps_h: f64) -> Option<&Table3Row> {
        self.table3.iter().find(|r| r.variant == variant && r.eps_h == eps_h)
    }
}

/// Iteration counts and subspace distances for the perturbed-basis and
/// perturbed-projection studies on the diagonal case.
pub fn compute_diag_tables(cfg: &ExperimentConfig) -> anyhow::Result<DiagTables> {
    cfg.validate()?;
    let case = diag_case(cfg.scale()?)?;
    let variants = cfg.variants()?;
    let a = case.operator();
    let run = |v: Variant, z: &_, cs: &CoarseSolve| -> anyhow::Result<ConvergenceHistory> {
        let mut h = solve_left(v, &a, z, cs, &case.rhs, cfg.tol, cfg.max_it)?.history;
        h.label = v.label().to_string();
        Ok(h)
    };

    let mut unpreconditioned = gmres(&a, &case.rhs, cfg.tol, cfg.max_it)?.history;
    unpreconditioned.label = "none".into();

    let v = &case.exact_basis;
    let exact_cs = build_projection(&a, v)?;
    let mut table2 = Vec::new();
    for &var in &variants {
        table2.push(Table2Row { variant: var, eps: f64::INFINITY, history: run(var, v, &exact_cs)? });
    }

    let cells: Vec<anyhow::Result<(Table1Row, Vec<Table2Row>)>> = cfg
        .eps_grid
        .par_iter()
        .map(|&eps| {
            let (z, ang) = perturb_basis(v, eps, cfg.seed)?;
            let (values, vectors) = rayleigh_ritz_subspace(&a, &z)?;
            let row1 = Table1Row { eps, sin_theta: ang.sin_theta, res_max: res_max(&a, &values, &vectors)? };
            let cs = build_projection(&a, &z)?;
            let rows = variants
                .iter()
                .map(|&var| Ok(Table2Row { variant: var, eps, history: run(var, &z, &cs)? }))
                .collect::<anyhow::Result<Vec<_>>>()?;
            Ok((row1, rows))
        })
        .collect();
    let mut table1 = Vec::new();
    for cell in cells {
        let (row1, rows) = cell?;
        table1.push(row1);
        table2.extend(rows);
    }

    let e = exact_cs.e().clone();
    let cells: Vec<anyhow::Result<Vec<Table3Row>>> = cfg
        .eps_h_grid
        .par_iter()
        .map(|&eps_h| {
            let cs = perturbed_solve(&e, eps_h, cfg.seed)?;
            let rho = cs.rho_norms()?;
            variants
                .iter()
                .map(|&var| Ok(Table3Row { variant: var, eps_h, rho, history: run(var, v, &cs)? }))
                .collect()
        })
        .collect();
    let mut table3 = Vec::new();
    for cell in cells {
        table3.extend(cell?);
    }
    Ok(DiagTables { unpreconditioned, table1, table2, table3 })
}

fn perturbed_solve(e: &spectral_precond::matkit::DenseMatrix, eps_h: f64, seed: u64) -> anyhow::Result<CoarseSolve> {
    let h = perturb_matrix(e, eps_h, seed);
    Ok(CoarseSolve::explicit(e.clone(), lu_factor(&h)?.inverse())?)
}

pub fn table1_csv(t: &DiagTables) -> String {
    let mut s = String::from("eps,sin_theta,res_max\n");
    for r in &t.table1 {
        s.push_str(&format!("{},{},{}\n", sci16(r.eps), sci16(r.sin_theta), sci16(r.res_max)));
    }
    s
}

pub fn table2_csv(t: &DiagTables) -> String {
    let mut s = String::from("variant,eps,iterations,converged\n");
    s.push_str(&format!(
        "none,{},{},{}\n",
        sci16(f64::INFINITY),
        count_field(&t.unpreconditioned),
        converged_field(&t.unpreconditioned)
    ));
    for r in &t.table2 {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.variant.label(),
            sci16(r.eps),
            count_field(&r.history),
            converged_field(&r.history)
        ));
    }
    s
}

pub fn table3_csv(t: &DiagTables) -> String {
    let mut s = String::from("eps_h,norm_hinv_e_minus_i,norm_e_hinv_minus_i,variant,iterations,converged\n");
    for r in &t.table3 {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sci16(r.eps_h),
            sci16(r.rho.rho2),
            sci16(r.rho.rho1),
            r.variant.label(),
            count_field(&r.history),
            converged_field(&r.history)
        ));
    }
    s
}

fn spectrum_csv(values: &[Eigenvalue]) -> String {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut s = String::from("re,im\n");
    for v in sorted {
        s.push_str(&format!("{},{}\n", sci16(v.re), sci16(v.im)));
    }
    s
}

fn tag(prefix: &str, eps: f64) -> String {
    format!("{prefix}{eps:e}")
}

/// Spectra of P·A for two perturbed bases (ε = 1e3, 1e5) and two perturbed
/// projection matrices (ε_h = 1e12, 1e16), one CSV per variant and one
/// gnuplot script per figure.
fn write_figures(cfg: &ExperimentConfig, case: &DiagonalTestCase, out: &mut Output) -> anyhow::Result<()> {
    let a = case.operator();
    let v = &case.exact_basis;
    let variants = cfg.variants()?;
    let exact = build_projection(&a, v)?;
    let mut figures = Vec::new();
    for eps in [1e3, 1e5] {
        let (z, _) = perturb_basis(v, eps, cfg.seed)?;
        let cs = build_projection(&a, &z)?;
        let spectra = variants
            .par_iter()
            .map(|&var| Ok((var, preconditioned_spectrum(case, var, &z, &cs)?)))
            .collect::<anyhow::Result<Vec<_>>>()?;
        figures.push((tag("V", eps), format!("Z = V + rand/{eps:e}"), spectra));
    }
    for eps_h in [1e12, 1e16] {
        let cs = perturbed_solve(exact.e(), eps_h, cfg.seed)?;
        let spectra = variants
            .par_iter()
            .map(|&var| Ok((var, preconditioned_spectrum(case, var, v, &cs)?)))
            .collect::<anyhow::Result<Vec<_>>>()?;
        figures.push((tag("E", eps_h), format!("V with H = E + rand/{eps_h:e}"), spectra));
    }
    for (t, title, spectra) in figures {
        let mut series = Vec::new();
        for (var, values) in spectra {
            let name = format!("spectrum_{t}_{}.csv", var.label());
            out.write(&name, &spectrum_csv(&values))?;
            series.push((name, format!("{}A", var.label())));
        }
        out.write(&format!("spectrum_{t}.gp"), &spectrum_script(&title, &series, &format!("spectrum_{t}.png")))?;
    }
    Ok(())
}

/// Writes `table1.csv`, `table2.csv`, `table3.csv`, the convergence history
/// of every run and, when `figures` is set, the spectrum plots.
pub fn run_diag_tables(cfg: &ExperimentConfig) -> anyhow::Result<Output> {
    let tables = compute_diag_tables(cfg)?;
    let mut out = Output::create(&cfg.output_dir)?;
    out.write("table1.csv", &table1_csv(&tables))?;
    out.write("table2.csv", &table2_csv(&tables))?;
    out.write("table3.csv", &table3_csv(&tables))?;
    out.write("convergence_diag_none.csv", &tables.unpreconditioned.to_csv())?;
    for r in &tables.table2 {
        out.write(&format!("convergence_diag_{}_{}.csv", tag("V", r.eps), r.variant.label()), &r.history.to_csv())?;
    }
    for r in &tables.table3 {
        out.write(&format!("convergence_diag_{}_{}.csv", tag("E", r.eps_h), r.variant.label()), &r.history.to_csv())?;
    }
    if cfg.figures {
        let case = diag_case(cfg.scale()?)?;
        write_figures(cfg, &case, &mut out)?;
    }
    out.write("config.json", &cfg.record())?;
    Ok(out)
}
