use std::path::{Path, PathBuf};

use anyhow::Context;
use spectral_precond::fmt::sci16;
use spectral_precond::krylov::ConvergenceHistory;

/// Files written by one command, in creation order.
#[derive(Debug, Default)]
pub struct Output {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Output {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(path.clone());
        Ok(path)
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    pub fn into_files(self) -> Vec<PathBuf> {
        self.files
    }
}

/// Iteration count, or the `-1` sentinel for a run that hit the cap.
pub fn count_field(h: &ConvergenceHistory) -> String {
    if h.converged {
        h.iterations.to_string()
    } else {
        "-1".to_string()
    }
}

pub fn converged_field(h: &ConvergenceHistory) -> &'static str {
    if h.converged {
        "true"
    } else {
        "false"
    }
}

/// Comma-joined `%.16e` values.
pub fn sci_row(values: &[f64]) -> String {
    values.iter().map(|v| sci16(*v)).collect::<Vec<_>>().join(",")
}

/// gnuplot script drawing `re,im` CSVs as point clouds in the complex plane.
pub fn spectrum_script(title: &str, series: &[(String, String)], png: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{png}'\n"));
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str("set xlabel 'Re'\nset ylabel 'Im'\nset logscale x\nset key outside\n");
    let plots: Vec<String> = series
        .iter()
        .map(|(file, label)| format!("'{file}' skip 1 using (abs($1)):2 with points title '{label}'"))
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

/// gnuplot script drawing `iter,relres` convergence CSVs on a log scale.
pub fn convergence_script(title: &str, series: &[(String, String)], png: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{png}'\n"));
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str("set xlabel 'iteration'\nset ylabel 'relative residual'\nset logscale y\nset format y '%.0e'\n");
    let plots: Vec<String> =
        series.iter().map(|(file, label)| format!("'{file}' skip 1 using 1:2 with lines title '{label}'")).collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}
