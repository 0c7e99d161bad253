//! Normalization-exponent diagnostic: the mean deficit `E[2 - M_n]` decays
//! like `n^(-rho)` with `rho = 4/5` at `a = 0`, `rho = 4/7` in the interior
//! `0 < a < 1`, and `rho = 2/3` at `a = 1` — a discontinuity at both
//! endpoints. The fitted exponent is the slope of `-ln(mean deficit)`
//! against `ln n` by least squares.
//!
//! At `a = 0` the spheroid degenerates to the unit *disk* in the plane
//! `x3 = 0`; the 4/5 exponent belongs to the uniform law on that disk (the
//! planar case of the unit-ball normalization `4/(d+3)`, of which the ball
//! mode's 2/3 is the `d = 3` case). Points confined to the circle *curve*
//! behave differently — their deficit is driven by the smallest angular gap
//! to antipodality over all pairs and decays like `n^-4` — so the circle
//! mode samples the disk. The curve sampler remains available as
//! [`sample_circle_diagnostic`](crate::sampling::sample_circle_diagnostic).

use super::ExperimentError;
use crate::diameter::{diameter_norm_pruned, diameter_pruned};
use crate::geometry::Point3;
use crate::sampling::{sample_ball_scaling, sample_parameter, RngStream};
use crate::stats::{mean, ols_linfit};
use crate::ShapeParam;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Support mode of the diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentMode {
    /// `a = 0`: uniform points of the degenerate support, the unit disk in
    /// the plane `x3 = 0`; expected exponent 4/5.
    Circle,
    /// `0 < a < 1`: uniform points of the spheroid; expected exponent 4/7.
    Interior(ShapeParam),
    /// `a = 1`: uniform points of the unit ball; expected exponent 2/3.
    Ball,
}

/// Uniform sample of the unit disk `x1^2 + x2^2 <= 1`, `x3 = 0`.
fn sample_disk(stream: RngStream, n: usize) -> Vec<Point3> {
    let mut rng = stream.rng();
    (0..n)
        .map(|_| {
            let r = rng.random::<f64>().sqrt();
            let (sin_t, cos_t) = (TAU * rng.random::<f64>()).sin_cos();
            Point3::new(r * cos_t, r * sin_t, 0.0)
        })
        .collect()
}

impl ExponentMode {
    pub fn expected_exponent(&self) -> f64 {
        match self {
            ExponentMode::Circle => 0.8,
            ExponentMode::Interior(_) => 4.0 / 7.0,
            ExponentMode::Ball => 2.0 / 3.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ExponentMode::Circle => "circle",
            ExponentMode::Interior(_) => "interior",
            ExponentMode::Ball => "ball",
        }
    }

    fn deficit_of_sample(
        &self,
        stream: RngStream,
        n: usize,
    ) -> Result<f64, ExperimentError> {
        let m_n = match self {
            ExponentMode::Circle => {
                // the a = 0 defect-sorted sweep is exact for planar points:
                // the pair bound specializes to the tight planar bound
                let points = sample_disk(stream, n);
                let flat = ShapeParam::new(0.0).expect("a = 0 is representable");
                diameter_pruned(&points, flat)?.m_n
            }
            ExponentMode::Interior(shape) => {
                let batch = sample_parameter(stream, n, *shape)?;
                diameter_pruned(&batch.points, *shape)?.m_n
            }
            ExponentMode::Ball => {
                let shape = ShapeParam::new(1.0).expect("a = 1 is representable");
                let batch = sample_ball_scaling(stream, n, shape)?;
                diameter_norm_pruned(&batch.points)?.m_n
            }
        };
        Ok(2.0 - m_n)
    }
}

/// One replication's deficit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub n: u64,
    pub rep: u32,
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub mode: ExponentMode,
    pub n_grid: Vec<u64>,
    pub replications: u32,
    pub mean_deficits: Vec<f64>,
    pub fitted_exponent: f64,
    pub expected_exponent: f64,
    pub stream: RngStream,
    pub rows: Vec<ExponentRow>,
}

/// Run the exponent diagnostic over `n_grid` (which must span at least one
/// decade). Replication `r` at grid position `g` uses substream
/// `stream.nth(g * replications + r)`.
pub fn run_exponent_experiment(
    mode: ExponentMode,
    n_grid: &[u64],
    replications: u32,
    stream: RngStream,
) -> Result<ExponentReport, ExperimentError> {
    if let ExponentMode::Interior(shape) = mode {
        shape.require_interior("0 < a < 1")?;
    }
    if replications == 0 {
        return Err(ExperimentError::ZeroBudget {
            what: "replications",
        });
    }
    let mut n_grid = n_grid.to_vec();
    n_grid.sort_unstable();
    n_grid.dedup();
    let span_ok = match (n_grid.first(), n_grid.last()) {
        (Some(&lo), Some(&hi)) => lo >= 2 && hi >= 10 * lo && n_grid.len() >= 2,
        _ => false,
    };
    if !span_ok {
        return Err(ExperimentError::BadNGrid);
    }

    let tasks: Vec<(usize, u32)> = (0..n_grid.len())
        .flat_map(|g| (0..replications).map(move |r| (g, r)))
        .collect();
    let rows: Vec<ExponentRow> = tasks
        .into_par_iter()
        .map(|(g, rep)| -> Result<ExponentRow, ExperimentError> {
            let idx = g as u64 * replications as u64 + rep as u64;
            let n = n_grid[g];
            let deficit = mode.deficit_of_sample(stream.nth(idx), n as usize)?;
            Ok(ExponentRow {
                n,
                rep,
                deficit,
            })
        })
        .collect::<Result<_, _>>()?;

    let mean_deficits: Vec<f64> = n_grid
        .iter()
        .map(|&n| {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.deficit)
                .collect();
            mean(&vals)
        })
        .collect();

    let x: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = mean_deficits.iter().map(|d| -d.ln()).collect();
    let fit = ols_linfit(&x, &y).ok_or(ExperimentError::BadNGrid)?;

    Ok(ExponentReport {
        mode,
        n_grid,
        replications,
        mean_deficits,
        fitted_exponent: fit.slope,
        expected_exponent: mode.expected_exponent(),
        stream,
        rows,
    })
}
