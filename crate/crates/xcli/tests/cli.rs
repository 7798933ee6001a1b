use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spectral_precond::krylov::ConvergenceHistory;

fn xcli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xcli")).args(args).output().expect("spawn xcli")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn header(p: &Path) -> String {
    fs::read_to_string(p).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn help_and_bad_usage() {
    assert_eq!(xcli(&["--help"]).status.code(), Some(0));
    assert_eq!(xcli(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(xcli(&["diag-tables", "--scale", "half"]).status.code(), Some(1));
}

#[test]
fn diag_tables_small_scale() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    let o = xcli(&["diag-tables", "--scale", "trunc:64", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(header(&out.join("table1.csv")), "eps,sin_theta,res_max");
    assert_eq!(header(&out.join("table2.csv")), "variant,eps,iterations,converged");
    assert_eq!(header(&out.join("table3.csv")), "eps_h,norm_hinv_e_minus_i,norm_e_hinv_minus_i,variant,iterations,converged");
    let cfg: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(cfg["scale"], "trunc:64");

    let mut seen = 0;
    for entry in fs::read_dir(&out).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap().to_str().unwrap().to_string();
        if !name.starts_with("convergence_") || !name.ends_with(".csv") {
            continue;
        }
        let h = ConvergenceHistory::from_csv(&name, &fs::read_to_string(&p).unwrap(), 1e-12).unwrap();
        assert_eq!(h.relres[0], 1.0, "{name}");
        if h.converged {
            assert!(*h.relres.last().unwrap() <= 1e-12, "{name}");
        }
        seen += 1;
    }
    // unpreconditioned + 3 variants × (exact, 5 basis and 4 projection perturbations)
    assert_eq!(seen, 1 + 3 * 10);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment":"diag-tables","scale":"trunc:40","seed":3,"eps_grid":[1e3],"eps_h_grid":[1e12],"variants":["PC"]}"#).unwrap();
    let out = dir.path().join("o");
    let o = xcli(&["diag-tables", "--config", path(&cfg), "--seed", "9", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rec: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(rec["seed"], 9);
    assert_eq!(rec["scale"], "trunc:40");
    let t2 = fs::read_to_string(out.join("table2.csv")).unwrap();
    assert!(t2.lines().skip(1).all(|l| l.starts_with("PC,") || l.starts_with("none,")), "{t2}");

    fs::write(&cfg, r#"{"scale":"trunc:40","unknown_key":1}"#).unwrap();
    assert_eq!(xcli(&["diag-tables", "--config", path(&cfg), "--out", path(&out)]).status.code(), Some(1));
}

#[test]
fn generated_problem_feeds_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let prob = dir.path().join("p");
    let o = xcli(&["gen-problem", "diag", "--scale", "trunc:60", "--eps", "1e3", "--out", path(&prob)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["matrix.mtx", "rhs.mtx", "basis_exact.mtx", "basis_perturbed.mtx"] {
        assert!(prob.join(f).exists(), "{f}");
    }
    let m = prob.join("matrix.mtx");
    let cases = [
        ("basis_perturbed.mtx", "PD", "exact"),
        ("basis_perturbed.mtx", "PC", "exact"),
        ("basis_perturbed.mtx", "PA", "exact"),
        ("basis_exact.mtx", "PD", "ilu"),
        ("basis_exact.mtx", "PC", "ilu"),
        ("basis_exact.mtx", "PA", "ilu"),
    ];
    for (basis, v, mode) in cases {
        let z = prob.join(basis);
        let out = dir.path().join(format!("s_{v}_{mode}"));
        let o = xcli(&["spectrum", "--matrix", path(&m), "--basis", path(&z), "--variant", v, "--h-mode", mode, "--out", path(&out)]);
        assert_eq!(o.status.code(), Some(0), "{v} {mode}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join(format!("spectrum_report_{v}.csv")).exists());
    }
    // inexact-projection intervals assume the exact space
    let z = prob.join("basis_perturbed.mtx");
    let o = xcli(&["spectrum", "--matrix", path(&m), "--basis", path(&z), "--h-mode", "ilu", "--out", path(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn spectrum_failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mtx");
    let z = dir.path().join("z.mtx");
    // symmetric but indefinite, outside the bounds' hypotheses
    fs::write(&a, "%%MatrixMarket matrix coordinate real symmetric\n4 4 5\n1 1 1.0\n2 2 2.0\n3 3 3.0\n4 4 -5.0\n2 1 0.5\n").unwrap();
    fs::write(&z, "%%MatrixMarket matrix array real general\n4 1\n0.0\n0.0\n0.6\n0.8\n").unwrap();
    let out = dir.path().join("o");
    let o = xcli(&["spectrum", "--matrix", path(&a), "--basis", path(&z), "--variant", "PD", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));

    let missing = dir.path().join("missing.mtx");
    assert_eq!(xcli(&["spectrum", "--matrix", path(&missing), "--basis", path(&z)]).status.code(), Some(1));
    fs::write(&a, "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 1.0\n").unwrap();
    assert_eq!(xcli(&["spectrum", "--matrix", path(&a), "--basis", path(&z), "--out", path(&out)]).status.code(), Some(1));
}

#[test]
fn bounds_check_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    let o = xcli(&["bounds-check", "--scale", "trunc:40", "--trials", "4", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(out.join("bounds_check.csv")).unwrap();
    // 3 angles × 4 trials × 3 variants
    assert_eq!(csv.lines().count(), 1 + 36);
}

#[test]
fn gen_bvp_writes_viscosity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = xcli(&["gen-problem", "bvp", "--field", "continuous", "--grid", "9", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(out.join("matrix.mtx")).unwrap().starts_with("%%MatrixMarket"));
    assert!(out.join("viscosity.csv").exists());
}
