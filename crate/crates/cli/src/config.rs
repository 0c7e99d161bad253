//! Run configuration: defaults per experiment, optional TOML config file,
//! CLI flag overrides. Flags win over file values, file values win over
//! profile defaults.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "OBLATE_RESULTS_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Sample,
    Diameter,
    Constant,
    Tail,
    Overlap,
    Poisson,
    Limit,
    Exponent,
    Chenstein,
    All,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Sample => "sample",
            ExperimentKind::Diameter => "diameter",
            ExperimentKind::Constant => "constant",
            ExperimentKind::Tail => "tail",
            ExperimentKind::Overlap => "overlap",
            ExperimentKind::Poisson => "poisson",
            ExperimentKind::Limit => "limit",
            ExperimentKind::Exponent => "exponent",
            ExperimentKind::Chenstein => "chenstein",
            ExperimentKind::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Both,
    Mc5d,
    Reduced3d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Circle,
    Interior,
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerArg {
    Parameter,
    Rejection,
    BallScaling,
    CircleDiagnostic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Acceptance-scale budgets (the documented reproduction run).
    Desk,
    /// Small budgets for smoke testing the pipeline.
    Smoke,
}

/// Fully resolved run configuration; serializable and embedded in every
/// record and manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub a: f64,
    pub n: u64,
    pub n_grid: Vec<u64>,
    pub replications: u32,
    pub eps_grid: Vec<f64>,
    /// Empty means "derive from lambda": {0, t*/2, t*, 1.5 t*} with
    /// lambda(t*) = 1.
    pub t_grid: Vec<f64>,
    pub pairs: u64,
    pub outer: u64,
    pub inner: u64,
    pub mc_budget: u64,
    pub cells: usize,
    pub method: MethodArg,
    pub mode: ModeArg,
    pub sampler: SamplerArg,
    /// Chen-Stein t; 0 means "derive from the measured curve ranges".
    pub t: f64,
    pub master_seed: u64,
    pub workers: usize,
    pub output_dir: PathBuf,
    pub check: bool,
    pub lambda_override: Option<f64>,
    pub profile: Profile,
}

impl RunConfig {
    pub fn defaults(experiment: ExperimentKind, profile: Profile) -> Self {
        let desk = matches!(profile, Profile::Desk);
        RunConfig {
            experiment,
            a: 0.5,
            n: match experiment {
                ExperimentKind::Poisson => {
                    if desk {
                        100_000
                    } else {
                        20_000
                    }
                }
                ExperimentKind::Limit => {
                    if desk {
                        200_000
                    } else {
                        20_000
                    }
                }
                ExperimentKind::Sample | ExperimentKind::Diameter => 10_000,
                _ => 100_000,
            },
            n_grid: if desk {
                vec![10_000, 30_000, 100_000, 300_000]
            } else {
                vec![1_000, 3_000, 10_000]
            },
            replications: match experiment {
                ExperimentKind::Exponent => {
                    if desk {
                        500
                    } else {
                        60
                    }
                }
                _ => {
                    if desk {
                        2000
                    } else {
                        200
                    }
                }
            },
            eps_grid: match experiment {
                ExperimentKind::Overlap => vec![0.05, 0.07, 0.1, 0.15, 0.2, 0.3],
                _ => vec![0.02, 0.05, 0.1, 0.2],
            },
            t_grid: Vec::new(),
            pairs: if desk { 100_000_000 } else { 8_000_000 },
            outer: if desk { 100_000 } else { 20_000 },
            inner: 10_000,
            mc_budget: if desk { 100_000_000 } else { 2_000_000 },
            cells: if desk { 800 } else { 200 },
            method: MethodArg::Both,
            mode: ModeArg::Interior,
            sampler: SamplerArg::Parameter,
            t: 0.0,
            master_seed: 42,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output_dir: default_output_dir(),
            check: false,
            lambda_override: None,
            profile,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && (0.0..=1.0).contains(&self.a)) {
            bail!("field `a`: {} outside [0, 1]", self.a);
        }
        let needs_interior = matches!(
            self.experiment,
            ExperimentKind::Constant
                | ExperimentKind::Tail
                | ExperimentKind::Overlap
                | ExperimentKind::Poisson
                | ExperimentKind::Limit
                | ExperimentKind::Chenstein
                | ExperimentKind::All
        ) || (self.experiment == ExperimentKind::Exponent && self.mode == ModeArg::Interior);
        if needs_interior && (self.a <= 0.0 || self.a >= 1.0) {
            bail!(
                "field `a`: {} must satisfy 0 < a < 1 for `{}`",
                self.a,
                self.experiment.name()
            );
        }
        if self.eps_grid.is_empty() {
            bail!("field `eps_grid`: must be nonempty");
        }
        if self.eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            bail!("field `eps_grid`: entries must be positive");
        }
        if self.t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            bail!("field `t_grid`: entries must be nonnegative");
        }
        if self.n_grid.is_empty() {
            bail!("field `n_grid`: must be nonempty");
        }
        if self.workers == 0 {
            bail!("field `workers`: must be positive");
        }
        if self.replications == 0 {
            bail!("field `replications`: must be positive");
        }
        if let Some(l) = self.lambda_override {
            if !(l > 0.0 && l.is_finite()) {
                bail!("field `lambda_override`: must be positive");
            }
        }
        Ok(())
    }
}

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
}

/// Optional config-file fields; every key mirrors a [`RunConfig`] field of
/// the same name (the experiment itself is chosen by the subcommand).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub a: Option<f64>,
    pub n: Option<u64>,
    pub n_grid: Option<Vec<u64>>,
    pub replications: Option<u32>,
    pub eps_grid: Option<Vec<f64>>,
    pub t_grid: Option<Vec<f64>>,
    pub pairs: Option<u64>,
    pub outer: Option<u64>,
    pub inner: Option<u64>,
    pub mc_budget: Option<u64>,
    pub cells: Option<usize>,
    pub method: Option<MethodArg>,
    pub mode: Option<ModeArg>,
    pub sampler: Option<SamplerArg>,
    pub t: Option<f64>,
    pub master_seed: Option<u64>,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub lambda_override: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
    }

    pub fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { cfg.$field = v.clone(); })*
            };
        }
        take!(
            a, n, n_grid, replications, eps_grid, t_grid, pairs, outer, inner, mc_budget, cells,
            method, mode, sampler, t, master_seed, workers, output_dir
        );
        if self.lambda_override.is_some() {
            cfg.lambda_override = self.lambda_override;
        }
    }
}

/// Accept plain integers and scientific notation ("1e8", "2.5e5") for
/// count-valued flags; the value must be a nonnegative integer.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(f.is_finite() && f >= 0.0 && f <= 9e18) {
        return Err(format!("`{s}` is not a representable count"));
    }
    if f.fract() != 0.0 {
        return Err(format!("`{s}` is not an integer"));
    }
    Ok(f as u64)
}
