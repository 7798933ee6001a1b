use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spectral_precond::precond::Variant;
use spectral_precond::problems::{Scale, ViscosityField, GRID};
use xcli::commands::{cmd_bounds_check, cmd_spectrum, gen_bvp, gen_diag};
use xcli::{run_bvp, run_diag_tables, ExperimentConfig, HMode, Output};

#[derive(Parser)]
#[command(name = "xcli", version, about = "Deflation, coarse correction and adapted deflation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `full` or `trunc:<n>`
    #[arg(long, global = true)]
    scale: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Perturbed-basis and perturbed-projection tables on the diagonal case
    DiagTables {
        #[command(flatten)]
        common: Common,
        /// Also compute the spectrum figures
        #[arg(long)]
        figures: bool,
    },
    /// One- and two-level Schwarz runs on the diffusion problem
    Bvp {
        #[command(flatten)]
        common: Common,
        /// Viscosity fields (overrides the config)
        #[arg(long, value_delimiter = ',')]
        field: Option<Vec<String>>,
        /// Subdomain counts (overrides the config)
        #[arg(long, value_delimiter = ',')]
        nparts: Option<Vec<usize>>,
        /// Ritz vectors per decomposition (overrides the config)
        #[arg(long, value_delimiter = ',')]
        ritz: Option<Vec<usize>>,
    },
    /// Certify the spectrum of P·A for Matrix Market inputs
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        basis: PathBuf,
        /// PD, PC or PA
        #[arg(long, default_value = "PD")]
        variant: String,
        /// exact or ilu
        #[arg(long, default_value = "exact")]
        h_mode: String,
    },
    /// Random perturbed-basis trials against the spectral bounds
    BoundsCheck {
        #[command(flatten)]
        common: Common,
        /// Trials per angle (overrides the config)
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Write a test problem as Matrix Market files
    GenProblem {
        #[command(flatten)]
        common: Common,
        /// diag or bvp
        kind: String,
        /// Perturbation 1/ε for an extra perturbed basis (diag)
        #[arg(long)]
        eps: Option<f64>,
        /// Viscosity field (bvp)
        #[arg(long, default_value = "skyscraper")]
        field: String,
        /// Interior nodes per direction (bvp)
        #[arg(long, default_value_t = GRID)]
        grid: usize,
    },
}

fn load(common: &Common, experiment: &str) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if cfg.experiment.is_empty() {
        cfg.experiment = experiment.to_string();
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(s) = &common.scale {
        s.parse::<Scale>()?;
        cfg.scale = s.clone();
    }
    if let Some(o) = &common.out {
        cfg.output_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(out: &Output) {
    for f in out.files() {
        println!("wrote {}", f.display());
    }
}

/// Ok(true) when a certification check failed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::DiagTables { common, figures } => {
            let mut cfg = load(&common, "diag-tables")?;
            cfg.figures |= figures;
            report(&run_diag_tables(&cfg)?);
            Ok(false)
        }
        Command::Bvp { common, field, nparts, ritz } => {
            let mut cfg = load(&common, "bvp")?;
            if let Some(f) = field {
                cfg.fields = f;
            }
            if let Some(n) = nparts {
                if ritz.is_none() && cfg.ritz_count.len() != 1 {
                    cfg.ritz_count = vec![cfg.ritz_count[0]];
                }
                cfg.nparts = n;
            }
            if let Some(r) = ritz {
                cfg.ritz_count = r;
            }
            cfg.validate()?;
            report(&run_bvp(&cfg)?);
            Ok(false)
        }
        Command::Spectrum { common, matrix, basis, variant, h_mode } => {
            let cfg = load(&common, "spectrum")?;
            let variant: Variant = variant.parse()?;
            let mode: HMode = h_mode.parse()?;
            let mut out = Output::create(&cfg.output_dir)?;
            let o = cmd_spectrum(&matrix, &basis, variant, mode, &mut out)?;
            report(&out);
            let i = o.report.interval;
            println!(
                "{}A: {} eigenvalues, {} zero, {} unit, interval [{:e}, {:e}], {} violations, {} flagged, {} complex skipped",
                variant.label(),
                o.report.eigenvalues.len(),
                o.report.zero_class.len(),
                o.report.unit_class.len(),
                i.lo,
                i.hi,
                o.report.violations.len(),
                o.report.flagged.len(),
                o.complex_skipped
            );
            Ok(!o.report.is_certified())
        }
        Command::BoundsCheck { common, trials } => {
            let mut cfg = load(&common, "bounds-check")?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            let mut out = Output::create(&cfg.output_dir)?;
            let s = cmd_bounds_check(&cfg, &mut out)?;
            report(&out);
            println!(
                "{} trials, {} violations, {} flagged, {} nonpositive PC spectra, max P_D/P_A mismatch {:e}",
                s.trials, s.violations, s.flagged, s.pc_nonpositive, s.max_cor_mismatch
            );
            Ok(s.violations > 0 || s.pc_nonpositive > 0)
        }
        Command::GenProblem { common, kind, eps, field, grid } => {
            let cfg = load(&common, "gen-problem")?;
            let mut out = Output::create(&cfg.output_dir)?;
            match kind.as_str() {
                "diag" => gen_diag(cfg.scale()?, eps, cfg.seed, &mut out)?,
                "bvp" => gen_bvp(field.parse::<ViscosityField>()?, grid, &mut out)?,
                _ => anyhow::bail!("unknown problem kind `{kind}` (expected diag or bvp)"),
            }
            report(&out);
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    // clap would exit with 2 on usage errors, which is reserved for
    // certification failures
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("certification violation");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
