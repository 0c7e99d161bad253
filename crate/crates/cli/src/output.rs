//! Result persistence: atomic file writes (a `.partial` suffix until the
//! rename, so interrupted runs leave no complete-looking artifacts), the run
//! manifest, and the constants cache.

use crate::config::RunConfig;
use anyhow::{Context, Result};
use oblate::constants::{ConstMethod, ConstantEstimate};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Write atomically: `path.partial` then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
    }
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = PathBuf::from(partial);
    std::fs::write(&partial, bytes)
        .with_context(|| format!("writing {}", partial.display()))?;
    std::fs::rename(&partial, path)
        .with_context(|| format!("renaming {} into place", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).context("serializing record")?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// A record file: the config snapshot plus the experiment payload.
#[derive(Debug, Serialize)]
pub struct Record<'a, T: Serialize> {
    pub config: &'a RunConfig,
    pub record: T,
}

/// One `--check` outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

/// Run manifest, written atomically after all outputs; a run without a
/// manifest is invalid.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub config: &'a RunConfig,
    pub artifact_version: &'static str,
    pub timestamp_unix: u64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<PathBuf>,
    pub checks: Vec<CheckResult>,
}

impl<'a> RunManifest<'a> {
    pub fn new(config: &'a RunConfig, wall: f64, outputs: Vec<PathBuf>, checks: Vec<CheckResult>) -> Self {
        RunManifest {
            config,
            artifact_version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            wall_clock_seconds: wall,
            outputs,
            checks,
        }
    }
}

/// Stem for output filenames: experiment, a, main budget, seed.
pub fn file_stem(experiment: &str, a: f64, budget: u64, seed: u64) -> String {
    format!("{experiment}_a{a}_n{budget}_seed{seed}")
}

/// Constants exported per the interchange schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantExport {
    pub a: f64,
    #[serde(rename = "I_a")]
    pub i_a: f64,
    pub stderr: f64,
    pub method: ConstMethod,
    pub budget: u64,
    #[serde(rename = "Lambda_a")]
    pub lambda_a: f64,
    #[serde(rename = "K_a")]
    pub k_a: f64,
}

impl ConstantExport {
    pub fn from_estimate(e: &ConstantEstimate) -> Self {
        let lambda = 9.0 * e.value / (64.0 * std::f64::consts::PI);
        ConstantExport {
            a: e.a,
            i_a: e.value,
            stderr: e.std_error,
            method: e.method,
            budget: e.budget,
            lambda_a: lambda,
            k_a: 2.0 * lambda,
        }
    }
}

/// Cache of constant estimates keyed by `(a, method, budget)`, persisted in
/// the results store so experiments reuse Lambda_a across runs.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct ConstantsCache {
    pub entries: Vec<ConstantExport>,
}

impl ConstantsCache {
    pub fn path(output_dir: &Path) -> PathBuf {
        output_dir.join("constants_cache.json")
    }

    pub fn load(output_dir: &Path) -> Self {
        let path = Self::path(output_dir);
        std::fs::read_to_string(&path)
            .ok()
            .and_then(|text| serde_json::from_str(&text).ok())
            .unwrap_or_default()
    }

    pub fn insert(&mut self, export: ConstantExport) {
        self.entries
            .retain(|e| !(e.a == export.a && e.method == export.method && e.budget == export.budget));
        self.entries.push(export);
        self.entries.sort_by(|x, y| {
            x.a.total_cmp(&y.a)
                .then_with(|| format!("{:?}", x.method).cmp(&format!("{:?}", y.method)))
                .then(x.budget.cmp(&y.budget))
        });
    }

    pub fn save(&self, output_dir: &Path) -> Result<()> {
        write_json(&Self::path(output_dir), self)
    }
}
