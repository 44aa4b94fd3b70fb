//! Experiment configuration: built-in defaults, then a JSON file, then flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use gkp_crosstalk::{eta_for, Rational};
use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Fully resolved settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub d1: i64,
    pub d2: i64,
    pub q_max: i64,
    pub p_max: i64,
    pub sigma_grid: Vec<f64>,
    pub eta_grid: Vec<f64>,
    #[serde(rename = "L")]
    pub lattice_scale_l: f64,
    pub sigma_c: f64,
    pub lognormal_mu: f64,
    pub shots: u64,
    pub seed: u64,
    /// Largest code dimension in the tradeoff sweep.
    pub d_max: i64,
    /// Depolarizing probabilities for the uncoded baseline.
    pub depol: Vec<f64>,
    /// Transmissivity used by the decoder demo and state dumps.
    pub eta: Rational,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    #[serde(skip)]
    pub format: Option<Format>,
}

/// Keys accepted in a `--config` JSON file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub d1: Option<i64>,
    pub d2: Option<i64>,
    pub q_max: Option<i64>,
    pub p_max: Option<i64>,
    pub sigma_grid: Option<GridSpec>,
    pub eta_grid: Option<GridSpec>,
    #[serde(alias = "L")]
    pub lattice_scale_l: Option<f64>,
    pub sigma_c: Option<f64>,
    pub lognormal_mu: Option<f64>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub d_max: Option<i64>,
    pub depol: Option<Vec<f64>>,
    pub eta: Option<String>,
    #[serde(alias = "out")]
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Command-line overrides; each one beats the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON config file; flags given alongside it take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub d1: Option<i64>,
    #[arg(long, global = true)]
    pub d2: Option<i64>,
    #[arg(long, global = true)]
    pub q_max: Option<i64>,
    #[arg(long, global = true)]
    pub p_max: Option<i64>,
    /// Noise grid as `start:stop:step` or a comma-separated list.
    #[arg(long, global = true)]
    pub sigma_grid: Option<GridSpec>,
    /// Transmissivity grid as `start:stop:step` or a comma-separated list.
    #[arg(long, global = true)]
    pub eta_grid: Option<GridSpec>,
    /// Lattice scale converting an η mismatch into a displacement.
    #[arg(long = "L", global = true, value_name = "L")]
    pub lattice_scale_l: Option<f64>,
    #[arg(long, global = true)]
    pub sigma_c: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lognormal_mu: Option<f64>,
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub d_max: Option<i64>,
    /// Depolarizing probabilities, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub depol: Option<Vec<f64>>,
    /// Transmissivity as `a/b` or a decimal.
    #[arg(long, global = true)]
    pub eta: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

pub const DEFAULT_SIGMA_GRID: &str = "0.05:0.6:0.01";
pub const DEFAULT_ETA_GRID: &str = "0.01:0.99:0.005";

impl ExperimentConfig {
    pub fn resolve(overrides: &Overrides) -> Result<Self, CliError> {
        let file = match &overrides.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let invalid = CliError::Invalid;
        let d1 = overrides.d1.or(file.d1).unwrap_or(2);
        let d2 = overrides.d2.or(file.d2).unwrap_or(2);
        if d1 < 1 || d2 < 1 {
            return Err(invalid(format!("code dimensions must be >= 1, got d1={d1} d2={d2}")));
        }
        let q_max = overrides.q_max.or(file.q_max).unwrap_or(1);
        let p_max = overrides.p_max.or(file.p_max).unwrap_or(1);
        if q_max < 1 || p_max < 1 {
            return Err(invalid(format!("q_max and p_max must be >= 1, got {q_max}, {p_max}")));
        }

        let sigma_spec = overrides
            .sigma_grid
            .clone()
            .or(file.sigma_grid)
            .unwrap_or_else(|| GridSpec::Range(DEFAULT_SIGMA_GRID.into()));
        let sigma_grid = sigma_spec.values().map_err(|e| invalid(format!("sigma grid: {e}")))?;
        if sigma_grid[0] <= 0.0 {
            return Err(invalid("sigma grid values must be > 0".into()));
        }
        let eta_spec = overrides
            .eta_grid
            .clone()
            .or(file.eta_grid)
            .unwrap_or_else(|| GridSpec::Range(DEFAULT_ETA_GRID.into()));
        let eta_grid = eta_spec.values().map_err(|e| invalid(format!("eta grid: {e}")))?;
        if eta_grid[0] < 0.0 || *eta_grid.last().expect("grid is nonempty") > 1.0 {
            return Err(invalid("eta grid values must lie in [0, 1]".into()));
        }

        let lattice_scale_l = overrides.lattice_scale_l.or(file.lattice_scale_l).unwrap_or(10.0);
        if !(lattice_scale_l > 0.0 && lattice_scale_l.is_finite()) {
            return Err(invalid(format!("L must be > 0, got {lattice_scale_l}")));
        }
        let sigma_c = overrides.sigma_c.or(file.sigma_c).unwrap_or(0.4);
        if !(sigma_c > 0.0 && sigma_c.is_finite()) {
            return Err(invalid(format!("sigma_c must be > 0, got {sigma_c}")));
        }
        let lognormal_mu = overrides.lognormal_mu.or(file.lognormal_mu).unwrap_or(0.4f64.ln());
        if !lognormal_mu.is_finite() {
            return Err(invalid("lognormal_mu must be finite".into()));
        }
        let shots = overrides.shots.or(file.shots).unwrap_or(100_000);
        if shots < 100 {
            return Err(invalid(format!("shots must be >= 100, got {shots}")));
        }
        let seed = overrides.seed.or(file.seed).unwrap_or(42);
        let d_max = overrides.d_max.or(file.d_max).unwrap_or(8);
        if d_max < 2 {
            return Err(invalid(format!("d_max must be >= 2, got {d_max}")));
        }
        let depol = overrides
            .depol
            .clone()
            .or(file.depol)
            .unwrap_or_else(|| vec![0.0, 0.05, 0.1]);
        if depol.is_empty() || depol.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(invalid("depolarizing probabilities must lie in [0, 1]".into()));
        }
        let eta = match overrides.eta.as_ref().or(file.eta.as_ref()) {
            Some(s) => s.parse::<Rational>().map_err(|e| invalid(format!("eta: {e}")))?,
            None => eta_for(1, 1, d1, d2).map_err(CliError::from)?,
        };

        Ok(ExperimentConfig {
            d1,
            d2,
            q_max,
            p_max,
            sigma_grid,
            eta_grid,
            lattice_scale_l,
            sigma_c,
            lognormal_mu,
            shots,
            seed,
            d_max,
            depol,
            eta,
            output_path: overrides.out.clone().or(file.output_path),
            format: overrides.format.or(file.format),
        })
    }

    /// Transmissivity grid restricted to the open interval, as the bound needs.
    pub fn open_eta_grid(&self) -> Result<&[f64], CliError> {
        if self.eta_grid[0] <= 0.0 || *self.eta_grid.last().expect("grid is nonempty") >= 1.0 {
            return Err(CliError::Invalid("eta grid values must lie in (0, 1) here".into()));
        }
        Ok(&self.eta_grid)
    }
}

fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
}
