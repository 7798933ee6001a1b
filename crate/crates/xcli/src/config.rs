use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use spectral_precond::precond::Variant;
use spectral_precond::problems::{Scale, ViscosityField, GRID};

/// One run of an experiment. Every field has a default, so `{}` is a valid
/// config; command-line flags override whatever the file sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub tol: f64,
    pub max_it: usize,
    /// `full` or `trunc:<n>`
    pub scale: String,
    pub output_dir: PathBuf,
    /// Subset of `PD`, `PC`, `PA`.
    pub variants: Vec<String>,
    /// 1/ε values for Z = V + rand/ε.
    pub eps_grid: Vec<f64>,
    /// 1/ε values for H̃ = Ẽ + rand/ε.
    pub eps_h_grid: Vec<f64>,
    /// Also write the eigenvalue plots of the diagonal study (dense
    /// eigensolves of P·A, slow at full scale).
    pub figures: bool,
    /// `skyscraper`, `continuous` or `constant:<c>`.
    pub fields: Vec<String>,
    pub grid: usize,
    pub nparts: Vec<usize>,
    /// Ritz vectors per decomposition, parallel to `nparts`; a single value
    /// applies to all of them.
    pub ritz_count: Vec<usize>,
    /// Coarse inverses to run the two-level methods with: `exact`, `ilu`.
    pub h_modes: Vec<String>,
    /// Largest principal angles (as sin θ) drawn by `bounds-check`.
    pub sin_thetas: Vec<f64>,
    /// Random bases per angle in `bounds-check`.
    pub trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: String::new(),
            seed: 0,
            tol: 1e-12,
            max_it: 300,
            scale: "full".into(),
            output_dir: PathBuf::from("out"),
            variants: Variant::ALL.iter().map(|v| v.label().to_string()).collect(),
            eps_grid: vec![1e1, 1e2, 1e3, 1e4, 1e5],
            eps_h_grid: vec![1e10, 1e12, 1e14, 1e16],
            figures: false,
            fields: vec!["skyscraper".into(), "continuous".into()],
            grid: GRID,
            nparts: vec![16, 32, 64, 128],
            ritz_count: vec![15, 16, 20, 20],
            h_modes: vec!["exact".into(), "ilu".into()],
            sin_thetas: vec![0.01, 0.1, 0.3],
            trials: 100,
        }
    }
}

/// How E⁻¹ is applied in the two-level methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HMode {
    Exact,
    Ilu,
}

impl HMode {
    pub fn label(self) -> &'static str {
        match self {
            HMode::Exact => "exact",
            HMode::Ilu => "ilu",
        }
    }
}

impl std::str::FromStr for HMode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "exact" => Ok(HMode::Exact),
            "ilu" => Ok(HMode::Ilu),
            _ => bail!("unknown coarse inverse mode `{s}` (expected exact or ilu)"),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    /// JSON record of the run written next to its outputs; the output
    /// directory is left out so that identical runs give identical files.
    pub fn record(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::from(".");
        c.to_json()
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.tol > 0.0) {
            bail!("tol must be positive, got {}", self.tol);
        }
        if self.max_it == 0 {
            bail!("max_it must be at least 1");
        }
        if self.eps_grid.iter().chain(&self.eps_h_grid).any(|e| !(*e > 0.0)) {
            bail!("perturbation parameters must be positive");
        }
        if self.ritz_count.len() != 1 && self.ritz_count.len() != self.nparts.len() {
            bail!("ritz_count has {} entries for {} decompositions", self.ritz_count.len(), self.nparts.len());
        }
        if self.sin_thetas.iter().any(|s| !(*s >= 0.0 && *s < 1.0)) {
            bail!("sin_thetas must lie in [0, 1)");
        }
        if self.ritz_count.contains(&0) {
            bail!("ritz_count entries must be positive");
        }
        self.scale()?;
        self.variants()?;
        self.fields()?;
        self.h_modes()?;
        Ok(())
    }

    pub fn scale(&self) -> anyhow::Result<Scale> {
        Ok(self.scale.parse()?)
    }

    pub fn variants(&self) -> anyhow::Result<Vec<Variant>> {
        let mut v = self.variants.iter().map(|s| s.parse::<Variant>()).collect::<Result<Vec<_>, _>>()?;
        v.sort();
        v.dedup();
        Ok(v)
    }

    pub fn fields(&self) -> anyhow::Result<Vec<ViscosityField>> {
        Ok(self.fields.iter().map(|s| s.parse()).collect::<Result<Vec<_>, _>>()?)
    }

    pub fn h_modes(&self) -> anyhow::Result<Vec<HMode>> {
        self.h_modes.iter().map(|s| s.parse()).collect()
    }

    /// Ritz vector count for the k-th decomposition.
    pub fn ritz_for(&self, k: usize) -> usize {
        if self.ritz_count.len() == 1 {
            self.ritz_count[0]
        } else {
            self.ritz_count[k]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        cfg.validate().unwrap();
        assert_eq!(cfg.variants().unwrap(), Variant::ALL.to_vec());
    }

    #[test]
    fn round_trips_through_json() {
        let mut cfg = ExperimentConfig::default();
        cfg.seed = 17;
        cfg.scale = "trunc:64".into();
        let back: ExperimentConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.scale().unwrap(), Scale::Truncated(64));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus": 1}"#).is_err());
        for json in [r#"{"tol": 0}"#, r#"{"max_it": 0}"#, r#"{"scale": "half"}"#, r#"{"variants": ["PX"]}"#, r#"{"ritz_count": [1, 2]}"#] {
            let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
            assert!(cfg.validate().is_err(), "{json}");
        }
    }
}
